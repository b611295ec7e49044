use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use telewm::checks::{run_checks, CheckOptions, Fault, DEFAULT_SEED};
use telewm::operators::{ChannelKind, ProtocolKind};
use telewm::pipeline::PipelineMode;
use telewm::reproduce::reproduce;
use telewm::sweep::{compare_protocols, default_r_values, fmax_curve, sweep, SweepGrid, DEFAULT_RESOLUTION};
use telewm::teleport::InputMeasure;

#[derive(Parser)]
#[command(name = "telewm", version, about = "Teleportation fidelity under weak-measurement protection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the invariant suite.
    Check {
        /// Seed for the randomized and Monte-Carlo checks.
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fidelity over the protection-parameter grid at one strength.
    Surface {
        #[command(flatten)]
        target: TargetArgs,
        #[arg(long, value_parser = parse_strength)]
        r: f64,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Maximal fidelity against strength.
    Fmax {
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Maximal fidelity of both protocols against strength.
    Compare {
        #[arg(long, value_parser = parse_channel)]
        channel: ChannelKind,
        #[command(flatten)]
        eval: EvalArgs,
    },
    /// Evaluate the reported maximal fidelities and write a JSON manifest.
    Reproduce {
        #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = parse_points)]
        resolution: usize,
        #[arg(long, value_parser = parse_measure, default_value = "real-polar")]
        measure: InputMeasure,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum FaultArg {
    KrausSign,
}

#[derive(Args)]
struct TargetArgs {
    #[arg(long, value_parser = parse_protocol)]
    protocol: ProtocolKind,
    #[arg(long, value_parser = parse_channel)]
    channel: ChannelKind,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long, value_parser = parse_mode, default_value = "physical")]
    mode: PipelineMode,
    #[arg(long, value_parser = parse_measure, default_value = "real-polar")]
    measure: InputMeasure,
    /// Points per parameter axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION, value_parser = parse_points)]
    resolution: usize,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_protocol(s: &str) -> Result<ProtocolKind, String> {
    s.parse()
}

fn parse_channel(s: &str) -> Result<ChannelKind, String> {
    s.parse()
}

fn parse_mode(s: &str) -> Result<PipelineMode, String> {
    s.parse()
}

fn parse_measure(s: &str) -> Result<InputMeasure, String> {
    s.parse()
}

fn parse_points(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(n) if n >= 1 => Ok(n),
        _ => Err(format!("'{s}' is not a positive integer")),
    }
}

fn parse_strength(s: &str) -> Result<f64, String> {
    let r: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&r) {
        Ok(r)
    } else {
        Err(format!("{r} is outside [0, 1]"))
    }
}

/// Fixed-point decimal with 17 significant digits; empty when missing.
fn num(x: Option<f64>) -> String {
    match x {
        None => String::new(),
        Some(0.0) => "0.0000000000000000".into(),
        Some(v) => {
            let decimals = (16 - v.abs().log10().floor() as i64).max(0) as usize;
            format!("{v:.decimals$}")
        }
    }
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body).with_context(|| format!("cannot write {}", path.display())),
        None => io::stdout().write_all(body.as_bytes()).context("cannot write to stdout"),
    }
}

fn status(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Check { seed, inject_fault, out } => {
            let opts = CheckOptions {
                seed,
                fault: inject_fault.map(|FaultArg::KrausSign| Fault::KrausSign),
                ..CheckOptions::default()
            };
            let report = run_checks(&opts);
            emit(&out, &report.render())?;
            if !report.all_pass() {
                eprintln!("failing invariants: {}", report.failing().join(", "));
            }
            Ok(status(report.all_pass()))
        }
        Command::Surface { target, r, eval } => {
            let grid = SweepGrid::with_resolution(target.protocol, eval.resolution, vec![r], eval.mode, eval.measure)?;
            let res = sweep(&grid, target.channel)?;
            let baseline = num(Some(res.baseline[0]));
            let mut csv = String::from("axis1,axis2,r,fidelity,baseline\n");
            for (i1, a1) in grid.axis1.values.iter().enumerate() {
                for (i2, a2) in grid.axis2.values.iter().enumerate() {
                    csv.push_str(&format!(
                        "{},{},{},{},{}\n",
                        num(Some(*a1)),
                        num(Some(*a2)),
                        num(Some(r)),
                        num(res.get(i1, i2, 0)),
                        baseline
                    ));
                }
            }
            emit(&eval.out, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fmax { target, eval } => {
            let pts = fmax_curve(
                target.protocol,
                target.channel,
                &default_r_values(),
                eval.resolution,
                eval.mode,
                eval.measure,
            )?;
            let mut csv = String::from("r,fmax,param1,param2,baseline\n");
            for p in pts {
                csv.push_str(&format!(
                    "{},{},{},{},{}\n",
                    num(Some(p.r)),
                    num(p.fmax),
                    num(p.axis1),
                    num(p.axis2),
                    num(Some(p.baseline))
                ));
            }
            emit(&eval.out, &csv)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Compare { channel, eval } => {
            let cmp = compare_protocols(channel, &default_r_values(), eval.resolution, eval.mode, eval.measure)?;
            let mut csv = String::from("r,baseline,fmax_i,fmax_ii\n");
            for row in &cmp.rows {
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    num(Some(row.r)),
                    num(Some(row.baseline)),
                    num(row.fmax_i),
                    num(row.fmax_ii)
                ));
            }
            emit(&eval.out, &csv)?;
            eprintln!(
                "{} {}",
                if cmp.verdict.holds { "HOLDS" } else { "FAILS" },
                cmp.verdict.statement
            );
            Ok(status(cmp.verdict.holds))
        }
        Command::Reproduce { resolution, measure, out } => {
            let manifest = reproduce(measure, resolution)?;
            let mut json = serde_json::to_string_pretty(&manifest)?;
            json.push('\n');
            emit(&out, &json)?;
            eprintln!("{}/{} targets reproduced", manifest.passed, manifest.targets.len());
            for t in manifest.targets.iter().filter(|t| !t.pass) {
                eprintln!("failed {}: {}", t.name, t.note.as_deref().unwrap_or(""));
            }
            Ok(status(manifest.all_pass))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let points = match &cli.command {
        Command::Fmax { eval, .. } | Command::Compare { eval, .. } => Some(eval.resolution),
        Command::Reproduce { resolution, .. } => Some(*resolution),
        _ => None,
    };
    if let Some(n) = points {
        if n < 2 {
            Cli::command()
                .error(ErrorKind::ValueValidation, "maximization needs --resolution of at least 2")
                .exit();
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
