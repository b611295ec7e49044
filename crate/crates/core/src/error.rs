use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TensorError {
    #[error("register size {0} outside 1..=5 qubits")]
    QubitCount(usize),
    #[error("index {index} out of range for a {num_qubits}-qubit register")]
    QubitIndex { index: usize, num_qubits: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error("rows of unequal length")]
    Ragged,
    #[error("invalid qubit set: {0}")]
    InvalidQubitSet(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("omega = {0} outside [0, pi]")]
    Omega(f64),
    #[error("q = {0} outside [0, 1]")]
    Q(f64),
    #[error("K{index} = {value} outside [-1, 1]")]
    K { index: u8, value: f64 },
    #[error("decoherence strength r = {0} outside [0, 1]")]
    Strength(f64),
    #[error("outcome bit {0} is not 0 or 1")]
    Bit(u8),
    #[error("teleportation outcome {0} outside 1..=4")]
    Outcome(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("protection pipeline annihilated the state (squared norm {0:e})")]
    ZeroNorm(f64),
    #[error("joint state has weight {0:e} outside the measurement span")]
    OutsideMeasurementSpan(f64),
    #[error("input qubit is not normalized (|alpha|^2 + |beta|^2 = {0})")]
    InputNotNormalized(f64),
    #[error("invalid sweep grid: {0}")]
    Grid(String),
}
