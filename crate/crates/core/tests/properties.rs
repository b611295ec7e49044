use proptest::prelude::*;
use telewm::operators::{ChannelKind, ChannelSpec, ProtocolParams};
use telewm::pipeline::{protect, PipelineMode, SharedState, FLIPPED_KETS, GHZ_KETS};
use telewm::sweep::{fmax_curve, SweepGrid};
use telewm::teleport::{average_fidelity_with, teleport, InputMeasure, InputQubit};
use telewm::SimError;

fn params() -> impl Strategy<Value = ProtocolParams> {
    prop_oneof![
        (0.0..=std::f64::consts::PI, 0.0..=1.0f64).prop_map(|(w, q)| ProtocolParams::protocol_i(w, q).unwrap()),
        (-1.0..=1.0f64, -1.0..=1.0f64).prop_map(|(a, b)| ProtocolParams::protocol_ii(a, b).unwrap()),
    ]
}

fn channel() -> impl Strategy<Value = ChannelKind> {
    prop_oneof![
        Just(ChannelKind::AmplitudeDamping),
        Just(ChannelKind::BitFlip),
        Just(ChannelKind::PhaseFlip)
    ]
}

fn mode() -> impl Strategy<Value = PipelineMode> {
    prop_oneof![Just(PipelineMode::PaperLiteral), Just(PipelineMode::PhysicalMixed)]
}

fn shared(p: &ProtocolParams, kind: ChannelKind, r: f64, mode: PipelineMode) -> Option<SharedState> {
    match protect(p, &ChannelSpec::new(kind, r).unwrap(), mode) {
        Ok(s) => Some(s),
        Err(SimError::ZeroNorm(_)) => None,
        Err(e) => panic!("{e}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn outcome_probabilities_sum_to_one(
        p in params(), kind in channel(), r in 0.0..=1.0f64, m in mode(),
        theta in 0.0..std::f64::consts::PI, phi in 0.0..6.3f64,
    ) {
        if let Some(s) = shared(&p, kind, r, m) {
            let run = teleport(&s, &InputQubit::from_bloch(theta, phi)).unwrap();
            prop_assert!((run.total_probability() - 1.0).abs() < 1e-10);
            for o in &run.outcomes {
                prop_assert!((0.0..=1.0).contains(&o.fidelity));
                prop_assert!((o.bob_state_raw.trace() - o.probability).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn global_phase_invariance(
        p in params(), kind in channel(), r in 0.0..=1.0f64, m in mode(),
        theta in 0.0..std::f64::consts::PI, phi in 0.0..6.3f64, g in 0.0..6.3f64,
    ) {
        if let Some(s) = shared(&p, kind, r, m) {
            let input = InputQubit::from_bloch(theta, phi);
            let a = teleport(&s, &input).unwrap();
            let b = teleport(&s, &input.with_phase(g)).unwrap();
            for (x, y) in a.outcomes.iter().zip(&b.outcomes) {
                prop_assert!((x.probability - y.probability).abs() < 1e-12);
                prop_assert!((x.fidelity - y.fidelity).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn paper_literal_is_normalized_on_eight_kets(p in params(), kind in channel(), r in 0.0..=1.0f64) {
        if let Some(s) = shared(&p, kind, r, PipelineMode::PaperLiteral) {
            let kets: Vec<usize> = GHZ_KETS.iter().chain(FLIPPED_KETS.iter()).copied().collect();
            prop_assert!(s.pure().unwrap().is_normalized(1e-12));
            prop_assert!(s.support_residual(&kets) < 1e-10);
        }
    }

    #[test]
    fn physical_output_is_a_density_operator(p in params(), kind in channel(), r in 0.0..=1.0f64) {
        if let Some(s) = shared(&p, kind, r, PipelineMode::PhysicalMixed) {
            prop_assert!(s.density().is_valid_density(1e-12, 1e-10, 1e-12));
            let ps = s.success_probability().unwrap();
            prop_assert!(ps > 0.0 && ps <= 1.0);
        }
    }

    #[test]
    fn phase_flip_keeps_ghz_support(p in params(), r in 0.0..=1.0f64, m in mode()) {
        if let Some(s) = shared(&p, ChannelKind::PhaseFlip, r, m) {
            prop_assert!(s.support_residual(&GHZ_KETS) < 1e-10);
        }
    }

    #[test]
    fn averaged_fidelity_is_a_probability(p in params(), kind in channel(), r in 0.0..=1.0f64, m in mode()) {
        if let Some(s) = shared(&p, kind, r, m) {
            for measure in InputMeasure::ALL {
                let f = average_fidelity_with(&s, measure).unwrap();
                prop_assert!((0.0..=1.0).contains(&f));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn refinement_never_lowers_the_maximum(kind in channel(), r in 0.0..=1.0f64, m in mode(), res in 3usize..8) {
        for protocol in [telewm::operators::ProtocolKind::I, telewm::operators::ProtocolKind::II] {
            let pt = fmax_curve(protocol, kind, &[r], res, m, InputMeasure::Haar).unwrap()[0];
            prop_assert!(pt.fmax.unwrap() >= pt.coarse_fmax.unwrap() - 1e-12);
        }
    }

    #[test]
    fn nested_grids_never_lower_the_maximum(kind in channel(), r in 0.0..=1.0f64, m in mode(), res in 2usize..6) {
        // A grid with 2n-1 points per axis contains the n-point grid.
        let coarse = SweepGrid::with_resolution(telewm::operators::ProtocolKind::II, res, vec![r], m, InputMeasure::Haar).unwrap();
        let fine = SweepGrid::with_resolution(telewm::operators::ProtocolKind::II, 2 * res - 1, vec![r], m, InputMeasure::Haar).unwrap();
        let a = telewm::sweep::sweep(&coarse, kind).unwrap().argmax[0].unwrap().fmax;
        let b = telewm::sweep::sweep(&fine, kind).unwrap().argmax[0].unwrap().fmax;
        prop_assert!(b >= a - 1e-12);
    }
}
