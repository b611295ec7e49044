//! Invariant suite run by `telewm check`.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::SimError;
use crate::operators::{
    completeness_sum, correction_unitary, flip, kraus_set, wm, wmr, ChannelKind, ChannelSpec, ProtocolKind,
    ProtocolParams,
};
use crate::pipeline::{protect, PipelineMode, SharedState, GHZ_KETS};
use crate::sweep::linspace;
use crate::teleport::{
    average_fidelity, average_fidelity_with, eta_basis, input_fidelity, monte_carlo_average, pauli_eigenstates,
    real_polar_input, teleport, InputMeasure, InputQubit,
};
use crate::tensor::QubitOperator;

pub const DEFAULT_SEED: u64 = 7;

/// Deliberate defects for exercising the suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Replaces `sqrt(1 - r)` by `sqrt(1 + r)` in the first Kraus element.
    KrausSign,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckOptions {
    pub seed: u64,
    pub fault: Option<Fault>,
    pub mc_samples: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            seed: DEFAULT_SEED,
            fault: None,
            mc_samples: 20_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub results: Vec<CheckResult>,
}

impl CheckReport {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failing(&self) -> Vec<&'static str> {
        self.results.iter().filter(|r| !r.pass).map(|r| r.name).collect()
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for r in &self.results {
            let _ = writeln!(s, "{} {}: {}", if r.pass { "PASS" } else { "FAIL" }, r.name, r.detail);
        }
        let n = self.results.iter().filter(|r| r.pass).count();
        let _ = writeln!(s, "{n}/{} invariants hold", self.results.len());
        s
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Haar average by product quadrature: Gauss-Legendre in cos(theta),
/// trapezoid in phi.
pub fn haar_quadrature(shared: &SharedState, n_theta: usize, n_phi: usize) -> Result<f64, SimError> {
    let mut total = 0.0;
    for (u, w) in gauss_legendre(n_theta) {
        let theta = u.acos();
        let mut ring = 0.0;
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            ring += input_fidelity(shared, &InputQubit::from_bloch(theta, phi))?;
        }
        total += 0.5 * w * ring / n_phi as f64;
    }
    Ok(total)
}

/// Real-polar average by Gauss-Legendre in cos(theta).
pub fn real_polar_quadrature(shared: &SharedState, n: usize) -> Result<f64, SimError> {
    let mut total = 0.0;
    for (u, w) in gauss_legendre(n) {
        total += 0.5 * w * input_fidelity(shared, &real_polar_input(u.acos()))?;
    }
    Ok(total)
}

fn kraus_under(channel: &ChannelSpec, fault: Option<Fault>) -> Result<Vec<QubitOperator>, SimError> {
    let mut ops = kraus_set(channel)?;
    if fault == Some(Fault::KrausSign) {
        let bad = (1.0 + channel.r).sqrt();
        ops[0] = match channel.kind {
            ChannelKind::AmplitudeDamping => QubitOperator::diag(1.0, bad),
            ChannelKind::BitFlip | ChannelKind::PhaseFlip => QubitOperator::identity().scale(bad),
        };
    }
    Ok(ops)
}

fn sample_params<R: Rng>(rng: &mut R, kind: ProtocolKind) -> ProtocolParams {
    match kind {
        ProtocolKind::I => ProtocolParams::protocol_i(rng.gen_range(0.05..PI / 2.0), rng.gen_range(0.05..1.0)),
        ProtocolKind::II => ProtocolParams::protocol_ii(rng.gen_range(-0.95..0.95), rng.gen_range(-0.95..0.95)),
    }
    .expect("sampled inside the valid range")
}

/// Protection parameters whose `n_i m_i` are both multiples of the identity.
pub fn balanced_params(kind: ProtocolKind, t: f64) -> ProtocolParams {
    match kind {
        ProtocolKind::I => {
            let omega = PI / 2.0 * t;
            ProtocolParams::protocol_i(omega, (omega / 2.0).tan()).unwrap()
        }
        ProtocolKind::II => ProtocolParams::protocol_ii(2.0 * t - 1.0, 1.0 - 2.0 * t).unwrap(),
    }
}

/// Measurement and reversal both proportional to the identity.
pub fn trivial_params(kind: ProtocolKind) -> ProtocolParams {
    match kind {
        ProtocolKind::I => ProtocolParams::protocol_i(PI / 2.0, 1.0).unwrap(),
        ProtocolKind::II => ProtocolParams::protocol_ii(0.0, 0.0).unwrap(),
    }
}

fn grid_params(kind: ProtocolKind, n: usize) -> Vec<ProtocolParams> {
    let [(lo1, hi1), (lo2, hi2)] = crate::sweep::valid_bounds(kind);
    let mut out = Vec::new();
    for a in linspace(lo1, hi1, n) {
        for b in linspace(lo2, hi2, n) {
            out.push(ProtocolParams::from_axes(kind, a, b).unwrap());
        }
    }
    out
}

type Outcome = Result<(bool, String), SimError>;

fn povm_completeness() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in [ProtocolKind::I, ProtocolKind::II] {
        for p in grid_params(kind, 11) {
            let m = completeness_sum(&[wm(&p, 0)?, wm(&p, 1)?]);
            worst = worst.max(m.max_abs_diff(&QubitOperator::identity()));
            if kind == ProtocolKind::II {
                let n = completeness_sum(&[wmr(&p, 0)?, wmr(&p, 1)?]);
                worst = worst.max(n.max_abs_diff(&QubitOperator::identity()));
            }
        }
    }
    Ok((worst < 1e-12, format!("max deviation from identity {worst:.3e}")))
}

fn kraus_completeness(fault: Option<Fault>) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for kind in ChannelKind::ALL {
        for r in linspace(0.0, 1.0, 11) {
            let ch = ChannelSpec::new(kind, r)?;
            let d = completeness_sum(&kraus_under(&ch, fault)?).max_abs_diff(&QubitOperator::identity());
            if d > worst {
                worst = d;
                at = format!(" at {kind} r={r}");
            }
        }
    }
    Ok((worst < 1e-12, format!("3 channels x 11 strengths, max deviation {worst:.3e}{at}")))
}

fn reversal_sum() -> Outcome {
    let mut worst: f64 = 0.0;
    for p in grid_params(ProtocolKind::I, 11) {
        let ProtocolParams::ProtocolI { q, .. } = p else { unreachable!() };
        let s = completeness_sum(&[wmr(&p, 0)?, wmr(&p, 1)?]);
        worst = worst.max(s.max_abs_diff(&QubitOperator::identity().scale(1.0 + q * q)));
    }
    Ok((worst < 1e-12, format!("sum of reversal elements vs (1+q^2)I, max deviation {worst:.3e}")))
}

fn operator_structure() -> Outcome {
    let mut ok = flip(0)?.is_unitary(0.0) && flip(1)?.is_unitary(0.0) && flip(1)?.is_anti_diagonal(0.0);
    for k in 1..=4 {
        ok &= correction_unitary(k)?.is_unitary(1e-15);
    }
    for kind in [ProtocolKind::I, ProtocolKind::II] {
        for p in grid_params(kind, 5) {
            for i in 0..2 {
                ok &= wm(&p, i)?.is_diagonal(0.0) && wmr(&p, i)?.is_diagonal(0.0);
            }
        }
    }
    Ok((ok, "flips and corrections unitary, measurement and reversal diagonal".into()))
}

fn eta_orthonormality() -> Outcome {
    let b = eta_basis();
    let mut worst: f64 = 0.0;
    for (i, x) in b.states().iter().enumerate() {
        for (j, y) in b.states().iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((x.inner(y)? - want).norm());
        }
    }
    Ok((worst < 1e-12, format!("max Gram deviation {worst:.3e}")))
}

fn probability_sums() -> Outcome {
    let mut worst: f64 = 0.0;
    let (mut cells, mut skipped) = (0usize, 0usize);
    let inputs = pauli_eigenstates();
    for kind in [ProtocolKind::I, ProtocolKind::II] {
        for channel in ChannelKind::ALL {
            for mode in PipelineMode::ALL {
                for p in grid_params(kind, 4) {
                    for r in linspace(0.0, 1.0, 4) {
                        let shared = match protect(&p, &ChannelSpec::new(channel, r)?, mode) {
                            Ok(s) => s,
                            Err(SimError::ZeroNorm(_)) => {
                                skipped += 1;
                                continue;
                            }
                            Err(e) => return Err(e),
                        };
                        cells += 1;
                        for input in &inputs {
                            worst = worst.max((teleport(&shared, input)?.total_probability() - 1.0).abs());
                        }
                    }
                }
            }
        }
    }
    Ok((
        worst < 1e-10,
        format!("{cells} cells ({skipped} annihilated), max |sum p - 1| {worst:.3e}"),
    ))
}

fn random_shared<R: Rng>(rng: &mut R) -> Result<SharedState, SimError> {
    loop {
        let kind = if rng.gen::<bool>() { ProtocolKind::I } else { ProtocolKind::II };
        let channel = ChannelKind::ALL[rng.gen_range(0..3)];
        let mode = PipelineMode::ALL[rng.gen_range(0..2)];
        let p = sample_params(rng, kind);
        match protect(&p, &ChannelSpec::new(channel, rng.gen_range(0.0..1.0))?, mode) {
            Err(SimError::ZeroNorm(_)) => continue,
            other => return other,
        }
    }
}

fn global_phase(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37);
    let mut worst: f64 = 0.0;
    for _ in 0..10 {
        let shared = random_shared(&mut rng)?;
        let input = InputQubit::from_bloch(rng.gen_range(0.0..PI), rng.gen_range(0.0..2.0 * PI));
        let a = teleport(&shared, &input)?;
        let b = teleport(&shared, &input.with_phase(rng.gen_range(0.0..2.0 * PI)))?;
        for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
            worst = worst.max((x.probability - y.probability).abs());
            worst = worst.max((x.fidelity - y.fidelity).abs());
        }
    }
    Ok((worst < 1e-12, format!("10 random cases, max difference {worst:.3e}")))
}

fn design_vs_quadrature(seed: u64) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x51ed);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let shared = random_shared(&mut rng)?;
        worst = worst.max((average_fidelity(&shared)? - haar_quadrature(&shared, 64, 128)?).abs());
        worst = worst.max(
            (average_fidelity_with(&shared, InputMeasure::RealPolar)? - real_polar_quadrature(&shared, 64)?).abs(),
        );
    }
    Ok((worst < 1e-9, format!("5 random states, 64x128 grid, max difference {worst:.3e}")))
}

fn noiseless_limits() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in [ProtocolKind::I, ProtocolKind::II] {
        for channel in ChannelKind::ALL {
            let ch = ChannelSpec::new(channel, 0.0)?;
            for p in grid_params(kind, 5) {
                match protect(&p, &ch, PipelineMode::PaperLiteral) {
                    Ok(s) => worst = worst.max((average_fidelity(&s)? - 1.0).abs()),
                    Err(SimError::ZeroNorm(_)) => {}
                    Err(e) => return Err(e),
                }
            }
            for t in linspace(0.05, 0.95, 5) {
                let s = protect(&balanced_params(kind, t), &ch, PipelineMode::PhysicalMixed)?;
                worst = worst.max((average_fidelity(&s)? - 1.0).abs());
            }
        }
    }
    Ok((
        worst < 1e-10,
        format!("r=0, paper-literal on a 5x5 grid and physical at balanced settings, max |F-1| {worst:.3e}"),
    ))
}

fn mode_coincidence() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut compare = |p: &ProtocolParams, channel: ChannelKind, r: f64| -> Result<(), SimError> {
        let ch = ChannelSpec::new(channel, r)?;
        let a = protect(p, &ch, PipelineMode::PaperLiteral)?;
        let b = protect(p, &ch, PipelineMode::PhysicalMixed)?;
        worst = worst.max(1.0 - a.fidelity_with(&b).unwrap_or(0.0));
        Ok(())
    };
    for kind in [ProtocolKind::I, ProtocolKind::II] {
        for t in linspace(0.05, 0.95, 5) {
            for channel in ChannelKind::ALL {
                compare(&balanced_params(kind, t), channel, 0.0)?;
            }
        }
        // A full bit flip keeps the branches aligned only when the
        // measurement itself is trivial.
        compare(&trivial_params(kind), ChannelKind::BitFlip, 1.0)?;
    }
    Ok((
        worst < 1e-10,
        format!("r=0 at balanced settings and full bit flip at trivial settings, max 1 - state fidelity {worst:.3e}"),
    ))
}

fn phase_flip_support() -> Outcome {
    let mut worst: f64 = 0.0;
    for kind in [ProtocolKind::I, ProtocolKind::II] {
        for p in grid_params(kind, 5) {
            for r in linspace(0.0, 1.0, 5) {
                match protect(&p, &ChannelSpec::new(ChannelKind::PhaseFlip, r)?, PipelineMode::PaperLiteral) {
                    Ok(s) => worst = worst.max(s.support_residual(&GHZ_KETS)),
                    Err(SimError::ZeroNorm(_)) => {}
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok((worst < 1e-10, format!("weight outside the GHZ kets {worst:.3e}")))
}

fn monte_carlo(seed: u64, samples: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0ffee);
    let mut worst_sigma: f64 = 0.0;
    for k in 0..3 {
        let shared = random_shared(&mut rng)?;
        let exact = average_fidelity(&shared)?;
        let est = monte_carlo_average(&shared, samples, seed.wrapping_add(k))?;
        let z = (est.mean - exact).abs() / (est.std_error + 1e-12);
        worst_sigma = worst_sigma.max(z);
    }
    Ok((
        worst_sigma <= 3.0,
        format!("3 random states, {samples} samples each, worst deviation {worst_sigma:.2} sigma"),
    ))
}

pub fn run_checks(opts: &CheckOptions) -> CheckReport {
    let checks: Vec<(&'static str, Box<dyn Fn() -> Outcome>)> = vec![
        ("povm_completeness", Box::new(povm_completeness)),
        ("kraus_completeness", Box::new(move || kraus_completeness(opts.fault))),
        ("reversal_sum", Box::new(reversal_sum)),
        ("operator_structure", Box::new(operator_structure)),
        ("eta_orthonormality", Box::new(eta_orthonormality)),
        ("probability_sums", Box::new(probability_sums)),
        ("global_phase", Box::new(move || global_phase(opts.seed))),
        ("design_vs_quadrature", Box::new(move || design_vs_quadrature(opts.seed))),
        ("noiseless_limits", Box::new(noiseless_limits)),
        ("mode_coincidence", Box::new(mode_coincidence)),
        ("phase_flip_support", Box::new(phase_flip_support)),
        ("monte_carlo", Box::new(move || monte_carlo(opts.seed, opts.mc_samples))),
    ];
    let results = checks
        .into_iter()
        .map(|(name, f)| match f() {
            Ok((pass, detail)) => CheckResult { name, pass, detail },
            Err(e) => CheckResult {
                name,
                pass: false,
                detail: format!("error: {e}"),
            },
        })
        .collect();
    CheckReport { results }
}
