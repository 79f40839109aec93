mod common;

use proptest::prelude::*;
use risk_compose::combinators::{CombinationSpec, IndexWeight};
use risk_compose::duality::{
    composed_dual_check, dual_evaluate, dual_evaluate_lp, min_penalty, mixture_penalty, DualSet, PenaltyValue,
};
use risk_compose::measures::{evaluate, RiskFamily, RiskMeasureSpec};
use risk_compose::prob::{Position, ScenarioMeasure};
use risk_compose::scalar::{ratio, Rational};
use risk_compose::suite::step_spectra;

fn exact_specs() -> Vec<RiskMeasureSpec<Rational>> {
    let mut v = vec![
        RiskMeasureSpec::ExpectedLoss,
        RiskMeasureSpec::MaxLoss,
        RiskMeasureSpec::ExpectedShortfall(ratio(1, 3)),
        RiskMeasureSpec::ExpectedShortfall(ratio(3, 4)),
    ];
    v.extend(step_spectra().into_iter().map(RiskMeasureSpec::Spectral));
    v
}

fn exact_instance() -> impl Strategy<Value = (Vec<Rational>, Vec<Rational>)> {
    (2usize..=4).prop_flat_map(|n| {
        (
            prop::collection::vec(-20i64..=20, n),
            prop::collection::vec(0i64..=6, n).prop_filter("some mass", |w| w.iter().any(|v| *v > 0)),
        )
            .prop_map(|(x, w)| {
                let total: i64 = w.iter().sum();
                (
                    x.into_iter().map(|v| ratio(v, 1)).collect(),
                    w.into_iter().map(|v| ratio(v, total)).collect(),
                )
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn primal_greedy_lp_and_vertices_agree((x, p) in exact_instance()) {
        let xp = Position::new(x.clone()).unwrap();
        let base = ScenarioMeasure::new(p.clone()).unwrap();
        for spec in exact_specs() {
            let primal = evaluate(&spec, &xp, &base).unwrap().value;
            let greedy = dual_evaluate(&spec, &xp, &base).unwrap();
            let lp = dual_evaluate_lp(&spec, &xp, &base).unwrap();
            let vertex = common::vertex_maximum(&spec, &x, &p);
            prop_assert_eq!(&primal, &vertex, "{}", spec.label());
            prop_assert_eq!(&greedy.value, &vertex, "{}", spec.label());
            prop_assert_eq!(&lp.value, &vertex, "{}", spec.label());
            prop_assert!(DualSet::of(&spec, &base).unwrap().contains(&greedy.certificate).unwrap());
            prop_assert!(common::is_probability(greedy.certificate.probs()));
        }
    }

    #[test]
    fn vertices_are_dual_members((x, p) in exact_instance()) {
        let base = ScenarioMeasure::new(p.clone()).unwrap();
        let _ = x;
        for spec in exact_specs() {
            let set = DualSet::of(&spec, &base).unwrap();
            for v in common::vertices(&common::dual_halfspaces(&spec, &p), p.len()) {
                prop_assert!(set.contains(&ScenarioMeasure::new(v).unwrap()).unwrap(), "{}", spec.label());
            }
        }
    }

    #[test]
    fn es_dual_sets_nest(w in prop::collection::vec(0i64..=6, 4).prop_filter("mass", |w| w.iter().any(|v| *v > 0)),
                         a in 1i64..=10, b in 1i64..=10) {
        let base = ScenarioMeasure::uniform(4).unwrap();
        let total: i64 = w.iter().sum();
        let q = ScenarioMeasure::new(w.iter().map(|v| ratio(*v, total)).collect()).unwrap();
        let (lo, hi) = (a.min(b), a.max(b));
        let small = min_penalty(&RiskMeasureSpec::ExpectedShortfall(ratio(hi, 10)), &base, &q).unwrap();
        let large = min_penalty(&RiskMeasureSpec::ExpectedShortfall(ratio(lo, 10)), &base, &q).unwrap();
        prop_assert!(!(small.is_zero() && large.is_infinite()));
    }

    #[test]
    fn mixture_decomposition_recombines(d in prop::collection::vec(0i64..=12, 4).prop_filter("mass", |d| d.iter().any(|v| *v > 0))) {
        let base = ScenarioMeasure::uniform(4).unwrap();
        let family = RiskFamily::broadcast(
            &[RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::ExpectedShortfall(0.25)],
            &[base],
        ).unwrap();
        let total: i64 = d.iter().sum();
        let q = ScenarioMeasure::new(d.iter().map(|v| *v as f64 / total as f64).collect()).unwrap();
        let mu = IndexWeight::new(vec![0.5, 0.5]).unwrap();
        let r = mixture_penalty(&family, &mu, &q).unwrap();
        let capped = d.iter().all(|v| (*v as f64) * 4.0 <= 3.0 * total as f64 + 1e-9);
        prop_assert_eq!(r.penalty.is_zero(), capped);
        if let Some(parts) = r.decomposition {
            let sets = [
                DualSet::of(&RiskMeasureSpec::ExpectedShortfall(0.5), &ScenarioMeasure::uniform(4).unwrap()).unwrap(),
                DualSet::of(&RiskMeasureSpec::ExpectedShortfall(0.25), &ScenarioMeasure::uniform(4).unwrap()).unwrap(),
            ];
            let mixed = ScenarioMeasure::mixture(&[0.5, 0.5], &parts).unwrap();
            for (a, b) in mixed.probs().iter().zip(q.probs()) {
                prop_assert!((a - b).abs() < 1e-9);
            }
            for (set, part) in sets.iter().zip(&parts) {
                prop_assert!(set.contains(part).unwrap());
            }
        }
    }

    #[test]
    fn composed_check_closes(x in prop::collection::vec(-20.0..20.0f64, 4), w in 0.0..=1.0f64) {
        let family = RiskFamily::broadcast(
            &[RiskMeasureSpec::ExpectedLoss, RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::MaxLoss],
            &[ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()],
        ).unwrap();
        let x = Position::new(x).unwrap();
        for f in [
            CombinationSpec::WorstCase,
            CombinationSpec::Mixture(IndexWeight::new(vec![w, (1.0 - w) / 2.0, (1.0 - w) / 2.0]).unwrap()),
        ] {
            let r = composed_dual_check(&f, &family, &x, 1e-8).unwrap();
            prop_assert!(r.passed, "{:?}", r);
            if let Some(v) = r.vertex_rhs {
                prop_assert!((v - r.lhs).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn constant_position_gives_minus_c() {
    let family = RiskFamily::broadcast(
        &[RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::ExpectedShortfall(0.25)],
        &[ScenarioMeasure::uniform(4).unwrap()],
    )
    .unwrap();
    let x = Position::constant(4, 3.0);
    for f in [CombinationSpec::WorstCase, CombinationSpec::Mixture(IndexWeight::uniform(2).unwrap())] {
        let r = composed_dual_check(&f, &family, &x, 1e-8).unwrap();
        assert!((r.lhs + 3.0).abs() < 1e-12 && (r.rhs + 3.0).abs() < 1e-8);
    }
}

#[test]
fn point_mass_penalty() {
    let base = ScenarioMeasure::uniform(4).unwrap();
    let q = ScenarioMeasure::point_mass(4, 0).unwrap();
    assert_eq!(min_penalty(&RiskMeasureSpec::ExpectedShortfall(0.5), &base, &q).unwrap(), PenaltyValue::Infinite);
    assert!(min_penalty(&RiskMeasureSpec::MaxLoss, &base, &q).unwrap().is_zero());
}
