//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

mod oracle;

use std::process::ExitCode;
use std::time::Instant;

use oracle::{Chan, Proto};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use telewm::checks::{run_checks, CheckOptions};
use telewm::operators::{ChannelKind, ChannelSpec, ProtocolKind, ProtocolParams};
use telewm::pipeline::{closed_form_check, protect, PipelineMode, GHZ_KETS};
use telewm::reproduce::reproduce_default;
use telewm::sweep::{compare_protocols, default_r_values, DEFAULT_RESOLUTION};
use telewm::teleport::{average_fidelity, InputMeasure};
use telewm::SimError;

struct Verdict {
    pass: bool,
    detail: String,
}

fn random_params(rng: &mut ChaCha8Rng, protocol: ProtocolKind) -> ProtocolParams {
    match protocol {
        ProtocolKind::I => ProtocolParams::protocol_i(rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..1.0)),
        ProtocolKind::II => ProtocolParams::protocol_ii(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
    }
    .unwrap()
}

fn tuples(seed: u64) -> Vec<(ProtocolParams, ChannelKind)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..100)
        .map(|k| {
            let protocol = if k % 2 == 0 { ProtocolKind::I } else { ProtocolKind::II };
            (random_params(&mut rng, protocol), ChannelKind::ALL[rng.gen_range(0..3)])
        })
        .collect()
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let report = run_checks(&CheckOptions::default());
    let secs = start.elapsed().as_secs_f64();
    Verdict {
        pass: report.all_pass() && secs < 30.0,
        detail: format!(
            "{}/{} invariants in {secs:.1} s; failing: [{}]",
            report.results.iter().filter(|r| r.pass).count(),
            report.results.len(),
            report.failing().join(", ")
        ),
    }
}

fn criterion_2() -> Verdict {
    let mut worst = [0.0f64; 2];
    let mut bad = [0usize; 2];
    for (p, kind) in tuples(2) {
        for (m, mode) in PipelineMode::ALL.iter().enumerate() {
            let f = protect(&p, &ChannelSpec::new(kind, 0.0).unwrap(), *mode).and_then(|s| average_fidelity(&s));
            let dev = f.map_or(f64::INFINITY, |f| (f - 1.0).abs());
            worst[m] = worst[m].max(dev);
            bad[m] += usize::from(dev > 1e-10);
        }
    }
    Verdict {
        pass: bad == [0, 0],
        detail: format!(
            "100 tuples at r=0: paper-literal {} off, max |F-1| {:.2e}; physical {} off, max |F-1| {:.2e}",
            bad[0], worst[0], bad[1], worst[1]
        ),
    }
}

fn criterion_3() -> Verdict {
    let cases = [
        (ChannelKind::AmplitudeDamping, 0.0),
        (ChannelKind::BitFlip, 0.0),
        (ChannelKind::PhaseFlip, 0.0),
        (ChannelKind::BitFlip, 1.0),
        (ChannelKind::PhaseFlip, 1.0),
    ];
    let (mut bad, mut total, mut worst, mut vanished) = (0usize, 0usize, 0.0f64, 0usize);
    let mut by_case = vec![0usize; cases.len()];
    for (p, _) in tuples(3) {
        for (c, (kind, r)) in cases.iter().enumerate() {
            let ch = ChannelSpec::new(*kind, *r).unwrap();
            total += 1;
            let gap = match (protect(&p, &ch, PipelineMode::PaperLiteral), protect(&p, &ch, PipelineMode::PhysicalMixed)) {
                (Ok(a), Ok(b)) => 1.0 - a.fidelity_with(&b).unwrap(),
                // One mode annihilates the state while the other does not.
                _ => {
                    vanished += 1;
                    1.0
                }
            };
            worst = worst.max(gap);
            if gap > 1e-10 {
                bad += 1;
                by_case[c] += 1;
            }
        }
    }
    let split: Vec<String> = cases
        .iter()
        .zip(&by_case)
        .map(|((k, r), n)| format!("{k} r={r}: {n}"))
        .collect();
    Verdict {
        pass: bad == 0,
        detail: format!(
            "{bad}/{total} comparisons below 1-1e-10, {vanished} of them with a vanishing state (max gap {worst:.2e}; {})",
            split.join(", ")
        ),
    }
}

fn criterion_4() -> Verdict {
    let m = reproduce_default().unwrap();
    for t in &m.targets {
        let values: Vec<String> = t
            .checkpoints
            .iter()
            .map(|c| {
                format!(
                    "r={} want {} paper {:.4} physical {:.4}",
                    c.checkpoint.r,
                    c.checkpoint.expected,
                    c.paper.fmax.unwrap_or(f64::NAN),
                    c.physical.fmax.unwrap_or(f64::NAN)
                )
            })
            .collect();
        println!("    {} {}: {}", if t.pass { "ok  " } else { "miss" }, t.name, values.join("; "));
    }
    let documented = m.targets.iter().all(|t| t.pass || t.note.is_some());
    Verdict {
        pass: m.all_pass,
        detail: format!(
            "{}/{} targets within 0.02 in some mode ({} measure); misses documented in manifest: {documented}",
            m.passed,
            m.targets.len(),
            m.measure
        ),
    }
}

fn criterion_5() -> Verdict {
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in ChannelKind::ALL {
        let cmp = compare_protocols(
            kind,
            &default_r_values(),
            DEFAULT_RESOLUTION,
            PipelineMode::PhysicalMixed,
            InputMeasure::RealPolar,
        )
        .unwrap();
        pass &= cmp.verdict.holds;
        parts.push(format!("{} [{}]", cmp.verdict.statement, if cmp.verdict.holds { "holds" } else { "fails" }));
    }
    Verdict {
        pass,
        detail: format!("physical mode, real-polar inputs: {}", parts.join("; ")),
    }
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut mc_rng = ChaCha8Rng::seed_from_u64(60);
    let (mut worst_z, mut bad) = (0.0f64, 0usize);
    let mut done = 0;
    while done < 20 {
        let (proto, params) = if rng.gen::<bool>() {
            let (omega, q) = (rng.gen_range(0.0..std::f64::consts::PI), rng.gen_range(0.0..1.0));
            (Proto::I { omega, q }, ProtocolParams::protocol_i(omega, q).unwrap())
        } else {
            let (k1, k2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            (Proto::II { k1, k2 }, ProtocolParams::protocol_ii(k1, k2).unwrap())
        };
        let (chan, kind) = [
            (Chan::Adc, ChannelKind::AmplitudeDamping),
            (Chan::Bfc, ChannelKind::BitFlip),
            (Chan::Pfc, ChannelKind::PhaseFlip),
        ][rng.gen_range(0..3)];
        let r = rng.gen_range(0.0..1.0);
        let (mode, coherent) = if rng.gen::<bool>() {
            (PipelineMode::PaperLiteral, true)
        } else {
            (PipelineMode::PhysicalMixed, false)
        };
        let Some(rho) = oracle::shared_density(proto, chan, r, coherent) else { continue };
        let exact = match protect(&params, &ChannelSpec::new(kind, r).unwrap(), mode) {
            Ok(s) => average_fidelity(&s).unwrap(),
            Err(SimError::ZeroNorm(_)) => continue,
            Err(e) => panic!("{e}"),
        };
        let (mean, se) = oracle::monte_carlo(&oracle::bob_maps(&rho), 100_000, &mut mc_rng);
        let z = (exact - mean).abs() / (se + 1e-12);
        worst_z = worst_z.max(z);
        bad += usize::from(z > 3.0);
        done += 1;
    }
    Verdict {
        pass: bad == 0,
        detail: format!("20 configurations, 1e5 Haar samples each; {bad} beyond 3 sigma, worst {worst_z:.2} sigma"),
    }
}

fn criterion_7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for protocol in [ProtocolKind::I, ProtocolKind::II] {
        for _ in 0..25 {
            let p = random_params(&mut rng, protocol);
            let ch = ChannelSpec::new(ChannelKind::PhaseFlip, rng.gen_range(0.0..1.0)).unwrap();
            match protect(&p, &ch, PipelineMode::PaperLiteral) {
                Ok(s) => worst = worst.max(s.support_residual(&GHZ_KETS)),
                Err(SimError::ZeroNorm(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
    }
    let mut logged = Vec::new();
    for (p, kind, r) in [
        (ProtocolParams::protocol_i(1.2, 0.6).unwrap(), ChannelKind::AmplitudeDamping, 0.5),
        (ProtocolParams::protocol_i(1.2, 0.6).unwrap(), ChannelKind::BitFlip, 0.5),
        (ProtocolParams::protocol_ii(0.3, 0.7).unwrap(), ChannelKind::AmplitudeDamping, 0.5),
        (ProtocolParams::protocol_ii(0.3, 0.7).unwrap(), ChannelKind::BitFlip, 0.5),
    ] {
        let rep = closed_form_check(&p, &ChannelSpec::new(kind, r).unwrap()).unwrap();
        for c in &rep.checks {
            println!(
                "    ratio {} {} ({}): printed {:.6} numeric {:.6} discrepancy {:.3e}",
                rep.protocol, rep.channel, c.formula, c.printed, c.numeric, c.discrepancy
            );
            logged.push(c.discrepancy);
        }
    }
    Verdict {
        pass: worst < 1e-10,
        detail: format!(
            "PFC support residual {worst:.2e} over 50 random settings; {} ADC/BFC ratio reports logged",
            logged.len()
        ),
    }
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 7] = [
        ("1 invariant suite", criterion_1),
        ("2 noiseless limit", criterion_2),
        ("3 mode coincidence", criterion_3),
        ("4 reported values", criterion_4),
        ("5 dominance verdicts", criterion_5),
        ("6 oracle equivalence", criterion_6),
        ("7 closed forms", criterion_7),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let v = f();
        failed += usize::from(!v.pass);
        println!(
            "criterion {name}: {} ({:.1} s) {}",
            if v.pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            v.detail
        );
    }
    println!("acceptance: {}/7 criteria pass", 7 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
