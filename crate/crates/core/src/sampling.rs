//! Seeded generators for the randomized checks.
//!
//! Half of the draws land on a coarse half-integer grid so that ties, equal
//! atoms and exact cancellations show up often; the rest are continuous.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A payoff in `[-scale, scale]`.
pub fn value(rng: &mut SeededRng, scale: f64) -> f64 {
    if rng.gen_bool(0.5) {
        let steps = (2.0 * scale) as i64;
        rng.gen_range(-steps..=steps) as f64 / 2.0
    } else {
        rng.gen_range(-scale..=scale)
    }
}

pub fn vector(rng: &mut SeededRng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| value(rng, scale)).collect()
}

/// A probability vector; roughly one draw in four has some zero entries.
pub fn probabilities(rng: &mut SeededRng, n: usize) -> Vec<f64> {
    let sparse = n > 1 && rng.gen_bool(0.25);
    let mut w: Vec<f64> = (0..n)
        .map(|_| {
            if sparse && rng.gen_bool(0.3) {
                0.0
            } else if rng.gen_bool(0.5) {
                rng.gen_range(1..=8) as f64
            } else {
                rng.gen_range(0.05..1.0)
            }
        })
        .collect();
    if w.iter().all(|v| *v == 0.0) {
        w[rng.gen_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    w
}

/// A pair of comonotone vectors: both are nondecreasing along one common
/// random ordering of the outcomes.
pub fn comonotone_pair(rng: &mut SeededRng, n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let mut a = vector(rng, n, scale);
    let mut b = vector(rng, n, scale);
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut x = vec![0.0; n];
    let mut y = vec![0.0; n];
    for (rank, &k) in order.iter().enumerate() {
        x[k] = a[rank];
        y[k] = b[rank];
    }
    (x, y)
}

pub fn unit_interval(rng: &mut SeededRng) -> f64 {
    if rng.gen_bool(0.2) {
        [0.0, 1.0, 0.5][rng.gen_range(0..3)]
    } else {
        rng.gen_range(0.0..=1.0)
    }
}

pub fn permutation(rng: &mut SeededRng, n: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    perm
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let a = vector(&mut rng(7), 6, 10.0);
        let b = vector(&mut rng(7), 6, 10.0);
        assert_eq!(a, b);
    }

    #[test]
    fn probabilities_are_normalized() {
        let mut r = rng(1);
        for n in 1..9 {
            let p = probabilities(&mut r, n);
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(p.iter().all(|v| *v >= 0.0));
        }
    }

    #[test]
    fn comonotone_pairs_are_comonotone() {
        let mut r = rng(3);
        for _ in 0..100 {
            let (x, y) = comonotone_pair(&mut r, 6, 10.0);
            for i in 0..6 {
                for j in 0..6 {
                    assert!((x[i] - x[j]) * (y[i] - y[j]) >= 0.0);
                }
            }
        }
    }
}
