//! Independent oracles: dual polytopes rebuilt from their definitions and
//! maximized by exhaustive vertex enumeration in exact arithmetic.

#![allow(dead_code)]

use num_traits::{One, Signed, Zero};
use risk_compose::kusuoka::Spectrum;
use risk_compose::measures::RiskMeasureSpec;
use risk_compose::scalar::Rational;

/// `a . q <= b`.
pub type Halfspace = (Vec<Rational>, Rational);

fn unit(n: usize, k: usize, v: Rational) -> Vec<Rational> {
    let mut a = vec![Rational::zero(); n];
    a[k] = v;
    a
}

/// `Phi(t) = int_0^t phi` from the step list.
pub fn distortion(phi: &Spectrum<Rational>, t: &Rational) -> Rational {
    let steps = phi.steps();
    let mut total = Rational::zero();
    for (j, (start, level)) in steps.iter().enumerate() {
        let end = steps.get(j + 1).map_or(Rational::one(), |s| s.0.clone());
        let hi = if *t < end { t.clone() } else { end };
        if hi > *start {
            total += (hi - start) * level;
        }
    }
    total
}

/// Halfspaces of the dual set of `spec` with respect to `p`, on top of
/// `q >= 0` and `sum q = 1`.
pub fn dual_halfspaces(spec: &RiskMeasureSpec<Rational>, p: &[Rational]) -> Vec<Halfspace> {
    let n = p.len();
    let mut rows: Vec<Halfspace> = (0..n).map(|k| (unit(n, k, -Rational::one()), Rational::zero())).collect();
    for (k, pk) in p.iter().enumerate() {
        if pk.is_zero() {
            rows.push((unit(n, k, Rational::one()), Rational::zero()));
        }
    }
    match spec {
        RiskMeasureSpec::ExpectedLoss => {
            for (k, pk) in p.iter().enumerate() {
                rows.push((unit(n, k, Rational::one()), pk.clone()));
            }
        }
        RiskMeasureSpec::ExpectedShortfall(alpha) if !alpha.is_zero() => {
            for (k, pk) in p.iter().enumerate() {
                rows.push((unit(n, k, Rational::one()), pk / alpha));
            }
        }
        RiskMeasureSpec::ExpectedShortfall(_) | RiskMeasureSpec::MaxLoss => {}
        RiskMeasureSpec::Spectral(phi) => {
            for mask in 1..(1u32 << n) - 1 {
                let a: Vec<Rational> = (0..n)
                    .map(|k| if mask >> k & 1 == 1 { Rational::one() } else { Rational::zero() })
                    .collect();
                let mass: Rational = p.iter().zip(&a).map(|(x, y)| x * y).sum();
                rows.push((a, distortion(phi, &mass)));
            }
        }
        other => panic!("no dual polytope for {}", other.label()),
    }
    rows
}

/// Solves the square system `m y = r`; `None` when singular.
pub fn solve(mut m: Vec<Vec<Rational>>, mut r: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = r.len();
    for col in 0..n {
        let pivot = (col..n).find(|&i| !m[i][col].is_zero())?;
        m.swap(col, pivot);
        r.swap(col, pivot);
        let inv = Rational::one() / m[col][col].clone();
        for v in &mut m[col][col..] {
            *v = &*v * &inv;
        }
        r[col] = &r[col] * &inv;
        for i in 0..n {
            if i != col && !m[i][col].is_zero() {
                let factor = m[i][col].clone();
                let pivot_row = m[col].clone();
                for (v, p) in m[i][col..].iter_mut().zip(&pivot_row[col..]) {
                    *v -= &factor * p;
                }
                let delta = &factor * &r[col];
                r[i] -= delta;
            }
        }
    }
    Some(r)
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Every vertex of `{q : rows, sum q = 1}`.
pub fn vertices(rows: &[Halfspace], n: usize) -> Vec<Vec<Rational>> {
    let mut out: Vec<Vec<Rational>> = Vec::new();
    for active in combinations(rows.len(), n - 1) {
        let mut m: Vec<Vec<Rational>> = active.iter().map(|&i| rows[i].0.clone()).collect();
        let mut r: Vec<Rational> = active.iter().map(|&i| rows[i].1.clone()).collect();
        m.push(vec![Rational::one(); n]);
        r.push(Rational::one());
        let Some(q) = solve(m, r) else { continue };
        let feasible = rows.iter().all(|(a, b)| {
            let lhs: Rational = a.iter().zip(&q).map(|(x, y)| x * y).sum();
            lhs <= *b
        });
        if feasible && !out.contains(&q) {
            out.push(q);
        }
    }
    out
}

/// `max E_Q[-X]` over the vertices of the dual polytope.
pub fn vertex_maximum(spec: &RiskMeasureSpec<Rational>, x: &[Rational], p: &[Rational]) -> Rational {
    let rows = dual_halfspaces(spec, p);
    vertices(&rows, p.len())
        .into_iter()
        .map(|q| -q.iter().zip(x).map(|(a, b)| a * b).sum::<Rational>())
        .max()
        .expect("nonempty polytope")
}

/// The `k`-th smallest entry (1-based), the uniform-space quantile at `k/n`.
pub fn order_statistic(x: &[f64], k: usize) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(f64::total_cmp);
    s[k - 1]
}

pub fn is_probability(q: &[Rational]) -> bool {
    q.iter().all(|v| !v.is_negative()) && q.iter().sum::<Rational>() == Rational::one()
}
