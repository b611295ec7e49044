//! Named single-qubit operators: flips, weak measurements and their
//! reversals for both protocols, channel Kraus sets, and Bob's corrections.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::tensor::QubitOperator;

/// Which weak-measurement family is in use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    #[serde(rename = "I")]
    I,
    #[serde(rename = "II")]
    II,
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProtocolKind::I => "I",
            ProtocolKind::II => "II",
        })
    }
}

impl FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "I" | "i" | "1" => Ok(ProtocolKind::I),
            "II" | "ii" | "2" => Ok(ProtocolKind::II),
            _ => Err(format!("unknown protocol '{s}' (expected I or II)")),
        }
    }
}

/// Weak-measurement parameters.
///
/// Protocol I uses `m0 = diag(cos w/2, sin w/2)` with the filter
/// `n0 = diag(q, 1)`; Protocol II uses `m0 = diag(K1+, K1-)` and
/// `n0 = diag(K2+, K2-)` with `K± = sqrt((1 ± K) / 2)`. Outcome 1 swaps the
/// diagonal entries in both cases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "protocol")]
pub enum ProtocolParams {
    #[serde(rename = "I")]
    ProtocolI { omega: f64, q: f64 },
    #[serde(rename = "II")]
    ProtocolII { k1: f64, k2: f64 },
}

impl ProtocolParams {
    pub fn protocol_i(omega: f64, q: f64) -> Result<Self, ParamError> {
        let p = ProtocolParams::ProtocolI { omega, q };
        p.validate()?;
        Ok(p)
    }

    pub fn protocol_ii(k1: f64, k2: f64) -> Result<Self, ParamError> {
        let p = ProtocolParams::ProtocolII { k1, k2 };
        p.validate()?;
        Ok(p)
    }

    /// Builds params of `kind` from the two sweep axes (`(omega, q)` or `(K1, K2)`).
    pub fn from_axes(kind: ProtocolKind, axis1: f64, axis2: f64) -> Result<Self, ParamError> {
        match kind {
            ProtocolKind::I => Self::protocol_i(axis1, axis2),
            ProtocolKind::II => Self::protocol_ii(axis1, axis2),
        }
    }

    pub fn kind(&self) -> ProtocolKind {
        match self {
            ProtocolParams::ProtocolI { .. } => ProtocolKind::I,
            ProtocolParams::ProtocolII { .. } => ProtocolKind::II,
        }
    }

    pub fn axes(&self) -> (f64, f64) {
        match *self {
            ProtocolParams::ProtocolI { omega, q } => (omega, q),
            ProtocolParams::ProtocolII { k1, k2 } => (k1, k2),
        }
    }

    pub fn validate(&self) -> Result<(), ParamError> {
        match *self {
            ProtocolParams::ProtocolI { omega, q } => {
                if !(0.0..=std::f64::consts::PI).contains(&omega) {
                    return Err(ParamError::Omega(omega));
                }
                if !(0.0..=1.0).contains(&q) {
                    return Err(ParamError::Q(q));
                }
            }
            ProtocolParams::ProtocolII { k1, k2 } => {
                if !(-1.0..=1.0).contains(&k1) {
                    return Err(ParamError::K { index: 1, value: k1 });
                }
                if !(-1.0..=1.0).contains(&k2) {
                    return Err(ParamError::K { index: 2, value: k2 });
                }
            }
        }
        Ok(())
    }
}

/// `(K+, K-)` for a Protocol II strength `K`.
pub fn k_pair(k: f64) -> (f64, f64) {
    (((1.0 + k) / 2.0).sqrt(), ((1.0 - k) / 2.0).sqrt())
}

fn bit(i: u8) -> Result<(), ParamError> {
    if i > 1 {
        return Err(ParamError::Bit(i));
    }
    Ok(())
}

fn swap_by_outcome(i: u8, a: f64, b: f64) -> QubitOperator {
    if i == 0 {
        QubitOperator::diag(a, b)
    } else {
        QubitOperator::diag(b, a)
    }
}

/// `f0 = I`, `f1 = sigma_x`.
pub fn flip(i: u8) -> Result<QubitOperator, ParamError> {
    bit(i)?;
    Ok(if i == 0 {
        QubitOperator::identity()
    } else {
        QubitOperator::pauli_x()
    })
}

/// Weak-measurement element `m_i`.
pub fn wm(params: &ProtocolParams, i: u8) -> Result<QubitOperator, ParamError> {
    params.validate()?;
    bit(i)?;
    Ok(match *params {
        ProtocolParams::ProtocolI { omega, .. } => {
            swap_by_outcome(i, (omega / 2.0).cos(), (omega / 2.0).sin())
        }
        ProtocolParams::ProtocolII { k1, .. } => {
            let (kp, km) = k_pair(k1);
            swap_by_outcome(i, kp, km)
        }
    })
}

/// Reversal element `n_i` applied by Bob after the post-flip.
pub fn wmr(params: &ProtocolParams, i: u8) -> Result<QubitOperator, ParamError> {
    params.validate()?;
    bit(i)?;
    Ok(match *params {
        ProtocolParams::ProtocolI { q, .. } => swap_by_outcome(i, q, 1.0),
        ProtocolParams::ProtocolII { k2, .. } => {
            let (kp, km) = k_pair(k2);
            swap_by_outcome(i, kp, km)
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChannelKind {
    #[serde(rename = "ADC")]
    AmplitudeDamping,
    #[serde(rename = "BFC")]
    BitFlip,
    #[serde(rename = "PFC")]
    PhaseFlip,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 3] = [
        ChannelKind::AmplitudeDamping,
        ChannelKind::BitFlip,
        ChannelKind::PhaseFlip,
    ];

    pub fn short_name(&self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDamping => "ADC",
            ChannelKind::BitFlip => "BFC",
            ChannelKind::PhaseFlip => "PFC",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ChannelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "adc" => Ok(ChannelKind::AmplitudeDamping),
            "bfc" => Ok(ChannelKind::BitFlip),
            "pfc" => Ok(ChannelKind::PhaseFlip),
            _ => Err(format!("unknown channel '{s}' (expected adc, bfc or pfc)")),
        }
    }
}

/// A noise channel at decoherence strength `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub r: f64,
}

impl ChannelSpec {
    pub fn new(kind: ChannelKind, r: f64) -> Result<Self, ParamError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(ParamError::Strength(r));
        }
        Ok(Self { kind, r })
    }

    pub fn kraus_set(&self) -> Result<Vec<QubitOperator>, ParamError> {
        kraus_set(self)
    }
}

/// Kraus elements `[e0, e1]` of a channel.
pub fn kraus_set(spec: &ChannelSpec) -> Result<Vec<QubitOperator>, ParamError> {
    let r = spec.r;
    if !(0.0..=1.0).contains(&r) {
        return Err(ParamError::Strength(r));
    }
    let keep = (1.0 - r).sqrt();
    let hit = r.sqrt();
    Ok(match spec.kind {
        ChannelKind::AmplitudeDamping => vec![
            QubitOperator::diag(1.0, keep),
            QubitOperator::from_real([[0.0, hit], [0.0, 0.0]]),
        ],
        ChannelKind::BitFlip => vec![
            QubitOperator::identity().scale(keep),
            QubitOperator::pauli_x().scale(hit),
        ],
        ChannelKind::PhaseFlip => vec![
            QubitOperator::identity().scale(keep),
            QubitOperator::pauli_z().scale(hit),
        ],
    })
}

/// Bob's correction after Alice reports outcome 1..=4:
/// `I`, `sigma_z`, `sigma_x`, `sigma_z sigma_x`.
pub fn correction_unitary(outcome: usize) -> Result<QubitOperator, ParamError> {
    Ok(match outcome {
        1 => QubitOperator::identity(),
        2 => QubitOperator::pauli_z(),
        3 => QubitOperator::pauli_x(),
        4 => QubitOperator::pauli_z() * QubitOperator::pauli_x(),
        _ => return Err(ParamError::Outcome(outcome)),
    })
}

/// `sum_i a_i^dagger a_i`.
pub fn completeness_sum(ops: &[QubitOperator]) -> QubitOperator {
    ops.iter()
        .fold(QubitOperator::zero(), |acc, e| acc.add(&(e.adjoint() * *e)))
}
