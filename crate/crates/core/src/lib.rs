//! Noisy teleportation through a four-qubit resource protected by weak
//! measurement, flip operations and measurement reversal.

pub mod checks;
pub mod error;
pub mod operators;
pub mod pipeline;
pub mod teleport;
pub mod reproduce;
pub mod sweep;
pub mod tensor;

pub use error::{ParamError, SimError, TensorError};
