//! Grid sweeps of the averaged fidelity over protection parameters, F_max
//! curves with one level of local refinement, and protocol comparison.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::SimError;
use crate::operators::{ChannelKind, ChannelSpec, ProtocolKind, ProtocolParams};
use crate::pipeline::{protect, PipelineMode};
use crate::teleport::{average_fidelity_with, unprotected_baseline_with, InputMeasure};

pub const DEFAULT_RESOLUTION: usize = 101;
pub const DEFAULT_R_POINTS: usize = 21;
/// Refinement subdivides each coarse step by this factor.
pub const REFINE_FACTOR: usize = 10;

/// `n` evenly spaced points on `[lo, hi]`; a single point sits at the midpoint.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n).map(|k| if k == n - 1 { hi } else { lo + step * k as f64 }).collect()
        }
    }
}

pub fn default_r_values() -> Vec<f64> {
    linspace(0.0, 1.0, DEFAULT_R_POINTS)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub name: &'static str,
    pub values: Vec<f64>,
}

/// Axis bounds searched by default. Protocol I only scans omega up to pi/2:
/// past that the paired reversal amplifies rather than undoes the
/// measurement back-action.
pub fn default_bounds(kind: ProtocolKind) -> [(&'static str, f64, f64); 2] {
    match kind {
        ProtocolKind::I => [("omega", 0.0, PI / 2.0), ("q", 0.0, 1.0)],
        ProtocolKind::II => [("k1", 0.0, 1.0), ("k2", 0.0, 1.0)],
    }
}

/// Largest valid range of each axis.
pub fn valid_bounds(kind: ProtocolKind) -> [(f64, f64); 2] {
    match kind {
        ProtocolKind::I => [(0.0, PI), (0.0, 1.0)],
        ProtocolKind::II => [(-1.0, 1.0), (-1.0, 1.0)],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepGrid {
    pub protocol: ProtocolKind,
    pub axis1: Axis,
    pub axis2: Axis,
    pub r_values: Vec<f64>,
    pub mode: PipelineMode,
    pub measure: InputMeasure,
}

impl SweepGrid {
    pub fn new(
        protocol: ProtocolKind,
        axis1: Vec<f64>,
        axis2: Vec<f64>,
        r_values: Vec<f64>,
        mode: PipelineMode,
        measure: InputMeasure,
    ) -> Result<Self, SimError> {
        let [(n1, _, _), (n2, _, _)] = default_bounds(protocol);
        let [b1, b2] = valid_bounds(protocol);
        check_axis(n1, &axis1, b1)?;
        check_axis(n2, &axis2, b2)?;
        check_axis("r", &r_values, (0.0, 1.0))?;
        Ok(SweepGrid {
            protocol,
            axis1: Axis { name: n1, values: axis1 },
            axis2: Axis { name: n2, values: axis2 },
            r_values,
            mode,
            measure,
        })
    }

    /// `resolution` points per axis over the default bounds.
    pub fn with_resolution(
        protocol: ProtocolKind,
        resolution: usize,
        r_values: Vec<f64>,
        mode: PipelineMode,
        measure: InputMeasure,
    ) -> Result<Self, SimError> {
        let [(_, lo1, hi1), (_, lo2, hi2)] = default_bounds(protocol);
        SweepGrid::new(
            protocol,
            linspace(lo1, hi1, resolution),
            linspace(lo2, hi2, resolution),
            r_values,
            mode,
            measure,
        )
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        (self.axis1.values.len(), self.axis2.values.len(), self.r_values.len())
    }

    pub fn params(&self, i1: usize, i2: usize) -> Result<ProtocolParams, SimError> {
        Ok(ProtocolParams::from_axes(self.protocol, self.axis1.values[i1], self.axis2.values[i2])?)
    }
}

fn check_axis(name: &str, values: &[f64], (lo, hi): (f64, f64)) -> Result<(), SimError> {
    if values.is_empty() {
        return Err(SimError::Grid(format!("axis {name} is empty")));
    }
    if values.iter().any(|v| !v.is_finite() || *v < lo || *v > hi) {
        return Err(SimError::Grid(format!("axis {name} leaves [{lo}, {hi}]")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SimError::Grid(format!("axis {name} is not strictly ascending")));
    }
    Ok(())
}

/// Averaged fidelity of one protected configuration.
pub fn evaluate(
    params: &ProtocolParams,
    channel: &ChannelSpec,
    mode: PipelineMode,
    measure: InputMeasure,
) -> Result<f64, SimError> {
    average_fidelity_with(&protect(params, channel, mode)?, measure)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArgMax {
    pub index1: usize,
    pub index2: usize,
    pub axis1: f64,
    pub axis2: f64,
    pub fmax: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    pub grid: SweepGrid,
    pub channel: ChannelKind,
    /// Flat `[axis1][axis2][r]`; `None` where the pipeline annihilated the state.
    pub fidelity: Vec<Option<f64>>,
    /// Per r; `None` when every cell is missing.
    pub argmax: Vec<Option<ArgMax>>,
    pub baseline: Vec<f64>,
}

impl SweepResult {
    pub fn get(&self, i1: usize, i2: usize, ir: usize) -> Option<f64> {
        let (_, n2, nr) = self.grid.shape();
        self.fidelity[(i1 * n2 + i2) * nr + ir]
    }
}

fn first_max(cells: impl Iterator<Item = (usize, usize, Option<f64>)>) -> Option<(usize, usize, f64)> {
    let mut best: Option<(usize, usize, f64)> = None;
    for (i1, i2, f) in cells {
        if let Some(f) = f {
            if best.is_none_or(|(_, _, b)| f > b) {
                best = Some((i1, i2, f));
            }
        }
    }
    best
}

pub fn sweep(grid: &SweepGrid, channel: ChannelKind) -> Result<SweepResult, SimError> {
    let (n1, n2, nr) = grid.shape();
    let channels = grid
        .r_values
        .iter()
        .map(|&r| Ok(ChannelSpec::new(channel, r)?))
        .collect::<Result<Vec<_>, SimError>>()?;
    let params = (0..n1 * n2)
        .map(|k| grid.params(k / n2, k % n2))
        .collect::<Result<Vec<_>, SimError>>()?;

    let fidelity: Vec<Option<f64>> = (0..n1 * n2 * nr)
        .into_par_iter()
        .map(|k| {
            let (cell, ir) = (k / nr, k % nr);
            match evaluate(&params[cell], &channels[ir], grid.mode, grid.measure) {
                Ok(f) => Ok(Some(f)),
                Err(SimError::ZeroNorm(_)) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_, SimError>>()?;

    let baseline = channels
        .iter()
        .map(|ch| unprotected_baseline_with(ch, grid.mode, grid.measure))
        .collect::<Result<Vec<_>, SimError>>()?;

    let argmax = (0..nr)
        .map(|ir| {
            let cells = (0..n1 * n2).map(|cell| (cell / n2, cell % n2, fidelity[cell * nr + ir]));
            first_max(cells).map(|(i1, i2, fmax)| ArgMax {
                index1: i1,
                index2: i2,
                axis1: grid.axis1.values[i1],
                axis2: grid.axis2.values[i2],
                fmax,
            })
        })
        .collect();

    Ok(SweepResult {
        grid: grid.clone(),
        channel,
        fidelity,
        argmax,
        baseline,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FmaxPoint {
    pub r: f64,
    pub fmax: Option<f64>,
    pub axis1: Option<f64>,
    pub axis2: Option<f64>,
    pub coarse_fmax: Option<f64>,
    pub baseline: f64,
}

fn refine_window(values: &[f64], index: usize, (lo, hi): (f64, f64)) -> Vec<f64> {
    let step = if values.len() > 1 {
        values[1] - values[0]
    } else {
        return vec![values[0]];
    };
    let center = values[index];
    let fine = step / REFINE_FACTOR as f64;
    let half = REFINE_FACTOR as i64;
    (-half..=half)
        .map(|k| center + fine * k as f64)
        .filter(|v| *v >= lo - 1e-15 && *v <= hi + 1e-15)
        .map(|v| v.clamp(lo, hi))
        .collect()
}

/// F_max versus r: coarse grid argmax, then a grid ten times finer over one
/// coarse step either side of it. The reported maximum never drops below
/// the coarse one.
pub fn fmax_curve(
    protocol: ProtocolKind,
    channel: ChannelKind,
    r_values: &[f64],
    resolution: usize,
    mode: PipelineMode,
    measure: InputMeasure,
) -> Result<Vec<FmaxPoint>, SimError> {
    if resolution < 2 {
        return Err(SimError::Grid(format!("resolution {resolution} is below 2")));
    }
    let grid = SweepGrid::with_resolution(protocol, resolution, r_values.to_vec(), mode, measure)?;
    let coarse = sweep(&grid, channel)?;
    let [(_, lo1, hi1), (_, lo2, hi2)] = default_bounds(protocol);

    let mut out = Vec::with_capacity(r_values.len());
    for (ir, &r) in r_values.iter().enumerate() {
        let baseline = coarse.baseline[ir];
        let Some(best) = coarse.argmax[ir] else {
            out.push(FmaxPoint {
                r,
                fmax: None,
                axis1: None,
                axis2: None,
                coarse_fmax: None,
                baseline,
            });
            continue;
        };
        let fine = SweepGrid::new(
            protocol,
            refine_window(&grid.axis1.values, best.index1, (lo1, hi1)),
            refine_window(&grid.axis2.values, best.index2, (lo2, hi2)),
            vec![r],
            mode,
            measure,
        )?;
        let refined = sweep(&fine, channel)?;
        let (fmax, a1, a2) = match refined.argmax[0] {
            Some(f) if f.fmax > best.fmax => (f.fmax, f.axis1, f.axis2),
            _ => (best.fmax, best.axis1, best.axis2),
        };
        out.push(FmaxPoint {
            r,
            fmax: Some(fmax),
            axis1: Some(a1),
            axis2: Some(a2),
            coarse_fmax: Some(best.fmax),
            baseline,
        });
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub r: f64,
    pub baseline: f64,
    pub fmax_i: Option<f64>,
    pub fmax_ii: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verdict {
    pub statement: String,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub channel: ChannelKind,
    pub mode: PipelineMode,
    pub measure: InputMeasure,
    pub rows: Vec<ComparisonRow>,
    pub verdict: Verdict,
}

/// Slack allowed on the "not below" comparisons.
pub const DOMINANCE_SLACK: f64 = 1e-9;
/// Largest gap counted as "about equal".
pub const CLOSENESS_TOL: f64 = 0.02;

fn dominance_verdict(channel: ChannelKind, rows: &[ComparisonRow]) -> Verdict {
    let pair = |row: &ComparisonRow| match (row.fmax_i, row.fmax_ii) {
        (Some(a), Some(b)) => Some((a, b)),
        _ => None,
    };
    match channel {
        ChannelKind::AmplitudeDamping => Verdict {
            statement: "ADC: protocol I F_max >= protocol II F_max for every r >= 0.3".into(),
            holds: rows
                .iter()
                .filter(|row| row.r >= 0.3 - 1e-12)
                .all(|row| pair(row).is_some_and(|(a, b)| a >= b - DOMINANCE_SLACK)),
        },
        ChannelKind::BitFlip => {
            let large: Vec<_> = rows.iter().filter(|row| (row.r - 0.9).abs() < 1e-9).collect();
            Verdict {
                statement: "BFC: protocol II F_max >= protocol I F_max at r = 0.9".into(),
                holds: !large.is_empty()
                    && large
                        .iter()
                        .all(|row| pair(row).is_some_and(|(a, b)| b >= a - DOMINANCE_SLACK)),
            }
        }
        ChannelKind::PhaseFlip => Verdict {
            statement: format!("PFC: |F_max(I) - F_max(II)| <= {CLOSENESS_TOL} for every r"),
            holds: rows
                .iter()
                .all(|row| pair(row).is_some_and(|(a, b)| (a - b).abs() <= CLOSENESS_TOL)),
        },
    }
}

pub fn compare_protocols(
    channel: ChannelKind,
    r_values: &[f64],
    resolution: usize,
    mode: PipelineMode,
    measure: InputMeasure,
) -> Result<Comparison, SimError> {
    let one = fmax_curve(ProtocolKind::I, channel, r_values, resolution, mode, measure)?;
    let two = fmax_curve(ProtocolKind::II, channel, r_values, resolution, mode, measure)?;
    let rows: Vec<ComparisonRow> = one
        .iter()
        .zip(&two)
        .map(|(a, b)| ComparisonRow {
            r: a.r,
            baseline: a.baseline,
            fmax_i: a.fmax,
            fmax_ii: b.fmax,
        })
        .collect();
    let verdict = dominance_verdict(channel, &rows);
    Ok(Comparison {
        channel,
        mode,
        measure,
        rows,
        verdict,
    })
}
