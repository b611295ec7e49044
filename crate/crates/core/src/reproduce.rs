//! The nine reported F_max values and a manifest of how close each comes.

use serde::Serialize;

use crate::error::SimError;
use crate::operators::{ChannelKind, ProtocolKind};
use crate::pipeline::PipelineMode;
use crate::sweep::{fmax_curve, DEFAULT_RESOLUTION};
use crate::teleport::InputMeasure;

pub const SCHEMA: u32 = 1;
pub const TOLERANCE: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// `|achieved - expected| <= tolerance`.
    Within,
    /// `achieved >= expected`.
    AtLeast,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Checkpoint {
    pub r: f64,
    pub expected: f64,
    pub tolerance: f64,
    pub criterion: Criterion,
    /// Also require F_max to sit within the tolerance of the unprotected value.
    pub matches_baseline: bool,
}

const fn within(r: f64, expected: f64) -> Checkpoint {
    Checkpoint {
        r,
        expected,
        tolerance: TOLERANCE,
        criterion: Criterion::Within,
        matches_baseline: false,
    }
}

/// One reported value; a statement covering two strengths carries two checkpoints.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Target {
    pub name: &'static str,
    pub protocol: ProtocolKind,
    pub channel: ChannelKind,
    pub checkpoints: Vec<Checkpoint>,
    pub source: &'static str,
}

pub fn targets() -> Vec<Target> {
    use ChannelKind::*;
    use ProtocolKind::*;
    let t = |name, protocol, channel, checkpoints: Vec<Checkpoint>, source| Target {
        name,
        protocol,
        channel,
        checkpoints,
        source,
    };
    vec![
        t(
            "I-ADC",
            I,
            AmplitudeDamping,
            vec![
                within(0.5, 0.999),
                Checkpoint {
                    criterion: Criterion::AtLeast,
                    ..within(0.9, 0.97)
                },
            ],
            "results: protocol I, ADC, 0.999 at r = 0.5 and close to 1 at r = 0.9",
        ),
        t("I-BFC-0.5", I, BitFlip, vec![within(0.5, 0.7667)], "results: protocol I, BFC, r = 0.5"),
        t(
            "I-BFC-0.9",
            I,
            BitFlip,
            vec![Checkpoint {
                matches_baseline: true,
                ..within(0.9, 0.58)
            }],
            "results: protocol I, BFC, r = 0.9, same as without protection",
        ),
        t(
            "I-PFC",
            I,
            PhaseFlip,
            vec![within(0.5, 0.733), within(0.9, 0.734)],
            "results: protocol I, PFC, 0.734 at r = 0.9",
        ),
        t("II-ADC-0.5", II, AmplitudeDamping, vec![within(0.5, 0.81)], "results: protocol II, ADC, r = 0.5"),
        t("II-ADC-0.9", II, AmplitudeDamping, vec![within(0.9, 0.754)], "results: protocol II, ADC, r = 0.9"),
        t("II-BFC-0.5", II, BitFlip, vec![within(0.5, 0.767)], "results: protocol II, BFC, r = 0.5"),
        t("II-BFC-0.9", II, BitFlip, vec![within(0.9, 0.733)], "results: protocol II, BFC, r = 0.9"),
        t(
            "II-PFC",
            II,
            PhaseFlip,
            vec![within(0.5, 0.733), within(0.9, 0.733)],
            "results: protocol II, PFC, close to 0.733 at r = 0.5 and 0.9",
        ),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ModeResult {
    pub fmax: Option<f64>,
    pub param1: Option<f64>,
    pub param2: Option<f64>,
    pub baseline: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckpointResult {
    #[serde(flatten)]
    pub checkpoint: Checkpoint,
    /// Scored, under the manifest's input measure.
    pub paper: ModeResult,
    pub physical: ModeResult,
    /// Haar-averaged values, recorded for comparison only.
    pub haar_paper: Option<f64>,
    pub haar_physical: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TargetResult {
    pub name: &'static str,
    pub protocol: ProtocolKind,
    pub channel: ChannelKind,
    pub source: &'static str,
    pub checkpoints: Vec<CheckpointResult>,
    pub pass_paper: bool,
    pub pass_physical: bool,
    pub pass: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReproductionManifest {
    pub schema: u32,
    pub measure: InputMeasure,
    pub resolution: usize,
    pub tolerance: f64,
    pub targets: Vec<TargetResult>,
    pub passed: usize,
    pub all_pass: bool,
}

impl ReproductionManifest {
    pub fn failing(&self) -> Vec<&'static str> {
        self.targets.iter().filter(|t| !t.pass).map(|t| t.name).collect()
    }
}

fn judge(c: &Checkpoint, fmax: Option<f64>, baseline: f64) -> bool {
    let Some(f) = fmax else { return false };
    let hit = match c.criterion {
        Criterion::Within => (f - c.expected).abs() <= c.tolerance,
        Criterion::AtLeast => f >= c.expected,
    };
    hit && (!c.matches_baseline || (f - baseline).abs() <= c.tolerance)
}

fn run_mode(
    t: &Target,
    c: &Checkpoint,
    mode: PipelineMode,
    measure: InputMeasure,
    resolution: usize,
) -> Result<ModeResult, SimError> {
    let p = fmax_curve(t.protocol, t.channel, &[c.r], resolution, mode, measure)?[0];
    Ok(ModeResult {
        fmax: p.fmax,
        param1: p.axis1,
        param2: p.axis2,
        baseline: p.baseline,
        pass: judge(c, p.fmax, p.baseline),
    })
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "none".into(), |v| format!("{v:.4}"))
}

/// A target passes when one mode meets every checkpoint.
pub fn evaluate_target(t: &Target, measure: InputMeasure, resolution: usize) -> Result<TargetResult, SimError> {
    let mut checkpoints = Vec::with_capacity(t.checkpoints.len());
    for c in &t.checkpoints {
        let paper = run_mode(t, c, PipelineMode::PaperLiteral, measure, resolution)?;
        let physical = run_mode(t, c, PipelineMode::PhysicalMixed, measure, resolution)?;
        let (haar_paper, haar_physical) = if measure == InputMeasure::Haar {
            (paper.fmax, physical.fmax)
        } else {
            (
                run_mode(t, c, PipelineMode::PaperLiteral, InputMeasure::Haar, resolution)?.fmax,
                run_mode(t, c, PipelineMode::PhysicalMixed, InputMeasure::Haar, resolution)?.fmax,
            )
        };
        checkpoints.push(CheckpointResult {
            checkpoint: *c,
            paper,
            physical,
            haar_paper,
            haar_physical,
        });
    }
    let pass_paper = checkpoints.iter().all(|c| c.paper.pass);
    let pass_physical = checkpoints.iter().all(|c| c.physical.pass);
    let pass = pass_paper || pass_physical;
    let note = (!pass).then(|| {
        checkpoints
            .iter()
            .filter(|c| !c.paper.pass || !c.physical.pass)
            .map(|c| {
                format!(
                    "r = {}: expected {}, paper-literal {}, physical {} (haar: {} and {})",
                    c.checkpoint.r,
                    c.checkpoint.expected,
                    fmt_opt(c.paper.fmax),
                    fmt_opt(c.physical.fmax),
                    fmt_opt(c.haar_paper),
                    fmt_opt(c.haar_physical),
                )
            })
            .collect::<Vec<_>>()
            .join("; ")
    });
    Ok(TargetResult {
        name: t.name,
        protocol: t.protocol,
        channel: t.channel,
        source: t.source,
        checkpoints,
        pass_paper,
        pass_physical,
        pass,
        note,
    })
}

pub fn reproduce(measure: InputMeasure, resolution: usize) -> Result<ReproductionManifest, SimError> {
    let targets = targets()
        .iter()
        .map(|t| evaluate_target(t, measure, resolution))
        .collect::<Result<Vec<_>, _>>()?;
    let passed = targets.iter().filter(|t| t.pass).count();
    Ok(ReproductionManifest {
        schema: SCHEMA,
        measure,
        resolution,
        tolerance: TOLERANCE,
        all_pass: passed == targets.len(),
        passed,
        targets,
    })
}

pub fn reproduce_default() -> Result<ReproductionManifest, SimError> {
    reproduce(InputMeasure::RealPolar, DEFAULT_RESOLUTION)
}
