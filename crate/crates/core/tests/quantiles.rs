mod common;

use proptest::prelude::*;
use risk_compose::prob::{distribution, is_comonotone, Position, ScenarioMeasure};

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0u32..=9, n).prop_map(|w| {
        let mut w: Vec<f64> = w.into_iter().map(f64::from).collect();
        if w.iter().all(|v| *v == 0.0) {
            w[0] = 1.0;
        }
        let total: f64 = w.iter().sum();
        w.into_iter().map(|v| v / total).collect()
    })
}

fn payoffs(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![(-20i32..=20).prop_map(f64::from), -20.0..20.0f64], n)
}

fn instance() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (2usize..=8).prop_flat_map(|n| (payoffs(n), weights(n)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn quantile_is_nondecreasing((x, q) in instance(), a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let f = distribution(&Position::new(x).unwrap(), &ScenarioMeasure::new(q).unwrap()).unwrap();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(f.quantile(&lo).unwrap() <= f.quantile(&hi).unwrap());
    }

    #[test]
    fn quantile_ignores_joint_permutations((x, q) in instance(), seed in any::<u64>()) {
        let n = x.len();
        let mut rng = risk_compose::sampling::rng(seed);
        let perm = risk_compose::sampling::permutation(&mut rng, n);
        let px: Vec<f64> = perm.iter().map(|&j| x[j]).collect();
        let pq: Vec<f64> = perm.iter().map(|&j| q[j]).collect();
        let f = distribution(&Position::new(x).unwrap(), &ScenarioMeasure::new(q).unwrap()).unwrap();
        let g = distribution(&Position::new(px).unwrap(), &ScenarioMeasure::new(pq).unwrap()).unwrap();
        prop_assert!(f.approx_eq(&g, &1e-12));
    }

    #[test]
    fn uniform_quantile_is_order_statistic(x in (1usize..=8).prop_flat_map(payoffs), k in 1usize..=8) {
        let n = x.len();
        let k = (k - 1) % n + 1;
        let f = distribution(&Position::new(x.clone()).unwrap(), &ScenarioMeasure::uniform(n).unwrap()).unwrap();
        let level = k as f64 / n as f64;
        prop_assert_eq!(f.quantile(&level).unwrap(), common::order_statistic(&x, k));
    }

    #[test]
    fn total_mass_is_one((x, q) in instance()) {
        let f = distribution(&Position::new(x).unwrap(), &ScenarioMeasure::new(q).unwrap()).unwrap();
        let last = f.atoms().last().unwrap();
        prop_assert!((last.cumulative - 1.0).abs() <= 1e-12);
        prop_assert!(f.atoms().windows(2).all(|w| w[0].value < w[1].value && w[0].cumulative < w[1].cumulative));
    }

    #[test]
    fn comonotonicity_is_symmetric(x in payoffs(5), y in payoffs(5)) {
        let (px, py) = (Position::new(x).unwrap(), Position::new(y).unwrap());
        prop_assert_eq!(is_comonotone(&px, &py).unwrap(), is_comonotone(&py, &px).unwrap());
        prop_assert!(is_comonotone(&px, &px).unwrap());
        prop_assert!(is_comonotone(&px, &Position::constant(5, 1.0)).unwrap());
    }

    #[test]
    fn generated_pairs_are_comonotone(seed in any::<u64>(), n in 2usize..=8) {
        let mut rng = risk_compose::sampling::rng(seed);
        let (a, b) = risk_compose::sampling::comonotone_pair(&mut rng, n, 20.0);
        prop_assert!(is_comonotone(&Position::new(a).unwrap(), &Position::new(b).unwrap()).unwrap());
    }
}

#[test]
fn zero_mass_outcomes_are_ignored() {
    let x = Position::new(vec![-100.0, 1.0, 2.0]).unwrap();
    let q = ScenarioMeasure::new(vec![0.0, 0.5, 0.5]).unwrap();
    let f = distribution(&x, &q).unwrap();
    assert_eq!(f.quantile(&0.0).unwrap(), 1.0);
    assert_eq!(f.atoms().len(), 2);
}
