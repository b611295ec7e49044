//! Teleportation of one input qubit through a protected shared state:
//! projective measurement of Alice's four qubits onto the η set, Bob's
//! correction, per-outcome fidelity and the input-averaged fidelity.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{ParamError, SimError};
use crate::operators::{correction_unitary, ChannelSpec};
use crate::pipeline::{unprotected, PipelineMode, SharedState};
use crate::tensor::{project_density, MixedState, PureState, C64};

/// Outcomes below this probability are dropped from the weighted fidelity.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-14;
/// Largest tolerated joint-state weight outside the η span.
pub const SPAN_TOL: f64 = 1e-8;

const INPUT_NORM_TOL: f64 = 1e-12;

/// `alpha|0> + beta|1>`, normalized.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputQubit {
    alpha: C64,
    beta: C64,
}

impl InputQubit {
    pub fn new(alpha: C64, beta: C64) -> Result<Self, SimError> {
        let n = alpha.norm_sqr() + beta.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > INPUT_NORM_TOL {
            return Err(SimError::InputNotNormalized(n));
        }
        Ok(InputQubit { alpha, beta })
    }

    /// Bloch-sphere point: `cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        InputQubit {
            alpha: C64::new((theta / 2.0).cos(), 0.0),
            beta: C64::from_polar((theta / 2.0).sin(), phi),
        }
    }

    pub fn alpha(&self) -> C64 {
        self.alpha
    }

    pub fn beta(&self) -> C64 {
        self.beta
    }

    pub fn with_phase(&self, phi: f64) -> Self {
        let p = C64::from_polar(1.0, phi);
        InputQubit {
            alpha: self.alpha * p,
            beta: self.beta * p,
        }
    }

    pub fn state(&self) -> PureState {
        PureState::new(1, vec![self.alpha, self.beta]).expect("one qubit")
    }
}

/// The six Pauli eigenstates `|0>, |1>, |+>, |->, |+i>, |-i>`.
pub fn pauli_eigenstates() -> [InputQubit; 6] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let q = |a: C64, b: C64| InputQubit { alpha: a, beta: b };
    [
        q(C64::new(1.0, 0.0), C64::new(0.0, 0.0)),
        q(C64::new(0.0, 0.0), C64::new(1.0, 0.0)),
        q(C64::new(h, 0.0), C64::new(h, 0.0)),
        q(C64::new(h, 0.0), C64::new(-h, 0.0)),
        q(C64::new(h, 0.0), C64::new(0.0, h)),
        q(C64::new(h, 0.0), C64::new(0.0, -h)),
    ]
}

/// How the input state is averaged over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InputMeasure {
    /// Uniform (Haar) measure on the Bloch sphere.
    #[serde(rename = "haar")]
    Haar,
    /// Real inputs `cos(theta)|0> + sin(theta)|1>`, theta in [0, pi],
    /// weighted by `sin(theta) / 2`.
    #[serde(rename = "real-polar")]
    RealPolar,
}

impl InputMeasure {
    pub const ALL: [InputMeasure; 2] = [InputMeasure::Haar, InputMeasure::RealPolar];

    pub fn label(&self) -> &'static str {
        match self {
            InputMeasure::Haar => "haar",
            InputMeasure::RealPolar => "real-polar",
        }
    }

    /// Weighted inputs whose weighted mean of F equals the exact average.
    ///
    /// F is a quadratic form in the input density, so the six Pauli
    /// eigenstates integrate it exactly over the sphere. Along the real
    /// polar curve F is a polynomial of degree at most 4 in `cos(theta)`
    /// once odd terms cancel, so 3-point Gauss-Legendre in `cos(theta)` is exact.
    pub fn nodes(&self) -> Vec<(InputQubit, f64)> {
        match self {
            InputMeasure::Haar => pauli_eigenstates().iter().map(|&s| (s, 1.0 / 6.0)).collect(),
            InputMeasure::RealPolar => {
                let u = 0.6f64.sqrt();
                [(-u, 5.0 / 18.0), (0.0, 8.0 / 18.0), (u, 5.0 / 18.0)]
                    .iter()
                    .map(|&(x, w)| (real_polar_input(x.acos()), w))
                    .collect()
            }
        }
    }
}

/// `cos(theta)|0> + sin(theta)|1>`.
pub fn real_polar_input(theta: f64) -> InputQubit {
    InputQubit {
        alpha: C64::new(theta.cos(), 0.0),
        beta: C64::new(theta.sin(), 0.0),
    }
}

impl fmt::Display for InputMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for InputMeasure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "haar" => Ok(InputMeasure::Haar),
            "real-polar" => Ok(InputMeasure::RealPolar),
            _ => Err(format!("unknown input measure '{s}' (expected haar or real-polar)")),
        }
    }
}

/// Four orthonormal states on (input, A, A, A).
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementBasis {
    states: [PureState; 4],
}

impl MeasurementBasis {
    pub fn states(&self) -> &[PureState; 4] {
        &self.states
    }

    /// `eta_i` for `i` in 1..=4.
    pub fn get(&self, i: usize) -> Result<&PureState, ParamError> {
        if (1..=4).contains(&i) {
            Ok(&self.states[i - 1])
        } else {
            Err(ParamError::Outcome(i))
        }
    }
}

pub fn eta_basis() -> MeasurementBasis {
    let make = |plus: [usize; 2], minus: [usize; 2], sign: f64| {
        let kets = [(plus[0], 0.5), (plus[1], 0.5), (minus[0], 0.5 * sign), (minus[1], 0.5 * sign)];
        PureState::from_kets(4, &kets).expect("four qubits")
    };
    MeasurementBasis {
        states: [
            make([0b0000, 0b0101], [0b1010, 0b1111], 1.0),
            make([0b0000, 0b0101], [0b1010, 0b1111], -1.0),
            make([0b0010, 0b0111], [0b1000, 0b1101], 1.0),
            make([0b0010, 0b0111], [0b1000, 0b1101], -1.0),
        ],
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TeleportOutcome {
    /// 1..=4.
    pub outcome: usize,
    pub probability: f64,
    /// Bob's qubit before correction; trace equals `probability`.
    pub bob_state_raw: MixedState,
    /// Normalized and corrected; `None` for negligible outcomes.
    pub bob_state_corrected: Option<MixedState>,
    pub fidelity: f64,
}

/// All four outcomes of one teleportation run.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportRun {
    pub outcomes: Vec<TeleportOutcome>,
}

impl TeleportRun {
    /// `sum_i p_i F_i` over non-negligible outcomes.
    pub fn fidelity(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.probability >= NEGLIGIBLE_PROBABILITY)
            .map(|o| o.probability * o.fidelity)
            .sum()
    }

    pub fn total_probability(&self) -> f64 {
        self.outcomes.iter().map(|o| o.probability).sum()
    }
}

const ALICE: [usize; 4] = [0, 1, 2, 3];

pub fn teleport(shared: &SharedState, input: &InputQubit) -> Result<TeleportRun, SimError> {
    let input = InputQubit::new(input.alpha, input.beta)?;
    let psi = input.state();
    let joint = psi.to_density().tensor(&shared.density())?;
    let basis = eta_basis();
    let mut outcomes = Vec::with_capacity(4);
    for (k, eta) in basis.states.iter().enumerate() {
        let raw = project_density(&joint, eta, &ALICE)?;
        let probability = raw.trace().max(0.0);
        let (corrected, fidelity) = if probability < NEGLIGIBLE_PROBABILITY {
            (None, 0.0)
        } else {
            let u = correction_unitary(k + 1)?;
            let rho = raw.conjugate_by(&u)?.scale(1.0 / probability);
            let f = rho.expectation(&psi)?.clamp(0.0, 1.0);
            (Some(rho), f)
        };
        outcomes.push(TeleportOutcome {
            outcome: k + 1,
            probability,
            bob_state_raw: raw,
            bob_state_corrected: corrected,
            fidelity,
        });
    }
    let run = TeleportRun { outcomes };
    let outside = 1.0 - run.total_probability();
    if outside.abs() > SPAN_TOL {
        return Err(SimError::OutsideMeasurementSpan(outside));
    }
    Ok(run)
}

/// Weighted teleportation fidelity for one input.
pub fn input_fidelity(shared: &SharedState, input: &InputQubit) -> Result<f64, SimError> {
    Ok(teleport(shared, input)?.fidelity())
}

/// Haar-averaged fidelity.
pub fn average_fidelity(shared: &SharedState) -> Result<f64, SimError> {
    average_fidelity_with(shared, InputMeasure::Haar)
}

pub fn average_fidelity_with(shared: &SharedState, measure: InputMeasure) -> Result<f64, SimError> {
    let mut total = 0.0;
    for (input, w) in measure.nodes() {
        total += w * input_fidelity(shared, &input)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Averaged fidelity of the channel alone, with no protection stages.
pub fn unprotected_baseline(channel: &ChannelSpec, mode: PipelineMode) -> Result<f64, SimError> {
    unprotected_baseline_with(channel, mode, InputMeasure::Haar)
}

pub fn unprotected_baseline_with(
    channel: &ChannelSpec,
    mode: PipelineMode,
    measure: InputMeasure,
) -> Result<f64, SimError> {
    average_fidelity_with(&unprotected(channel, mode)?, measure)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

/// Seeded Monte-Carlo estimate of the Haar-averaged fidelity.
pub fn monte_carlo_average(shared: &SharedState, samples: usize, seed: u64) -> Result<MonteCarloEstimate, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let cos_theta: f64 = 2.0 * rng.gen::<f64>() - 1.0;
        let phi = 2.0 * PI * rng.gen::<f64>();
        let f = input_fidelity(shared, &InputQubit::from_bloch(cos_theta.acos(), phi))?;
        sum += f;
        sum_sq += f * f;
    }
    let n = samples as f64;
    let mean = sum / n;
    let var = if samples > 1 { ((sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / n).sqrt(),
        samples,
    })
}
