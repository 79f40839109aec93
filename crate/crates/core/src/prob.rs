//! Finite probability spaces, positions, scenario measures and the step
//! distribution/quantile functions every risk functional is evaluated on.

use std::collections::HashSet;

use crate::error::{check_len, Error, Result};
use crate::scalar::{cmp, sum, Scalar};

/// Normalization slack for float probability vectors.
pub const PROB_TOL: f64 = 1e-12;

/// A probability vector over the outcome list of some space.
///
/// Scenario measures do not own their space; operations that combine a
/// measure with a position check the dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioMeasure<T: Scalar = f64> {
    probs: Vec<T>,
}

impl<T: Scalar> ScenarioMeasure<T> {
    pub fn new(probs: Vec<T>) -> Result<Self> {
        validate_probability_vector(&probs, "scenario measure")?;
        Ok(Self { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("scenario measure", "no outcomes"));
        }
        let p = T::one() / T::from_usize(n);
        Ok(Self { probs: vec![p; n] })
    }

    /// Point mass on outcome `k` of an `n`-outcome space.
    pub fn point_mass(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::domain(format!("outcome {k} out of range 0..{n}")));
        }
        let mut probs = vec![T::zero(); n];
        probs[k] = T::one();
        Ok(Self { probs })
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `E_Q[X]`.
    pub fn expectation(&self, x: &Position<T>) -> Result<T> {
        check_len(self.len(), x.len())?;
        Ok(crate::scalar::dot(&self.probs, x.values()))
    }

    /// True when `self` puts no mass where `base` has none.
    pub fn is_absolutely_continuous(&self, base: &ScenarioMeasure<T>) -> bool {
        let tol = T::tol(PROB_TOL);
        self.len() == base.len()
            && self
                .probs
                .iter()
                .zip(&base.probs)
                .all(|(q, p)| !p.is_zero() || *q <= tol)
    }

    /// Radon-Nikodym derivative `dQ/dP`, set to zero on `P`-null outcomes.
    pub fn density(&self, base: &ScenarioMeasure<T>) -> Result<Vec<T>> {
        check_len(base.len(), self.len())?;
        Ok(self
            .probs
            .iter()
            .zip(&base.probs)
            .map(|(q, p)| {
                if p.is_zero() {
                    T::zero()
                } else {
                    q.clone() / p.clone()
                }
            })
            .collect())
    }

    /// Measure with density `d` against `base`.
    pub fn from_density(base: &ScenarioMeasure<T>, density: &[T]) -> Result<Self> {
        check_len(base.len(), density.len())?;
        let probs = base
            .probs
            .iter()
            .zip(density)
            .map(|(p, d)| p.clone() * d.clone())
            .collect();
        Self::new(probs)
    }

    /// `sum_i w_i Q_i`.
    pub fn mixture(weights: &[T], measures: &[ScenarioMeasure<T>]) -> Result<Self> {
        check_len(weights.len(), measures.len())?;
        let n = measures
            .first()
            .ok_or_else(|| Error::domain("empty mixture"))?
            .len();
        let mut probs = vec![T::zero(); n];
        for (w, m) in weights.iter().zip(measures) {
            check_len(n, m.len())?;
            for (acc, q) in probs.iter_mut().zip(&m.probs) {
                *acc = acc.clone() + w.clone() * q.clone();
            }
        }
        Self::new(probs)
    }

    pub fn map_scalar<U: Scalar>(&self) -> ScenarioMeasure<U> {
        ScenarioMeasure {
            probs: self.probs.iter().map(|p| U::from_f64(p.to_f64())).collect(),
        }
    }
}

pub(crate) fn validate_probability_vector<T: Scalar>(probs: &[T], what: &'static str) -> Result<()> {
    if probs.is_empty() {
        return Err(Error::invalid(what, "no outcomes"));
    }
    if let Some(k) = probs
        .iter()
        .position(|p| p.lt_zero() || !p.is_finite_value())
    {
        return Err(Error::invalid(
            what,
            format!("mass {} at index {k} is not a finite nonnegative number", probs[k]),
        ));
    }
    let total = sum(probs);
    if (total.clone() - T::one()).abs() > T::tol(PROB_TOL) {
        return Err(Error::invalid(what, format!("masses sum to {total}, not 1")));
    }
    Ok(())
}

/// The reference space `(Omega, F, P)`: labelled outcomes with base masses.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteProbSpace<T: Scalar = f64> {
    outcome_ids: Vec<String>,
    base: ScenarioMeasure<T>,
}

impl<T: Scalar> FiniteProbSpace<T> {
    pub fn new(outcome_ids: Vec<String>, base_probs: Vec<T>) -> Result<Self> {
        check_len(outcome_ids.len(), base_probs.len())?;
        let mut seen = HashSet::new();
        for id in &outcome_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::invalid(
                    "probability space",
                    format!("duplicate outcome id `{id}`"),
                ));
            }
        }
        let base = ScenarioMeasure::new(base_probs)?;
        Ok(Self { outcome_ids, base })
    }

    /// `n` equally likely outcomes labelled `w1..wn`.
    pub fn uniform(n: usize) -> Result<Self> {
        let base = ScenarioMeasure::uniform(n)?;
        Ok(Self {
            outcome_ids: (1..=n).map(|k| format!("w{k}")).collect(),
            base,
        })
    }

    pub fn len(&self) -> usize {
        self.outcome_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outcome_ids.is_empty()
    }

    pub fn outcome_ids(&self) -> &[String] {
        &self.outcome_ids
    }

    pub fn base(&self) -> &ScenarioMeasure<T> {
        &self.base
    }

    /// A scenario measure on this space; must be absolutely continuous
    /// with respect to the base masses.
    pub fn scenario(&self, probs: Vec<T>) -> Result<ScenarioMeasure<T>> {
        check_len(self.len(), probs.len())?;
        let q = ScenarioMeasure::new(probs)?;
        if !q.is_absolutely_continuous(&self.base) {
            return Err(Error::invalid(
                "scenario measure",
                "puts mass on an outcome with zero base probability",
            ));
        }
        Ok(q)
    }

    pub fn position(&self, values: Vec<T>) -> Result<Position<T>> {
        check_len(self.len(), values.len())?;
        Position::new(values)
    }

    /// True when every outcome has the same base mass.
    pub fn is_uniform(&self) -> bool {
        let first = &self.base.probs[0];
        let tol = T::tol(PROB_TOL);
        self.base
            .probs
            .iter()
            .all(|p| (p.clone() - first.clone()).abs() <= tol)
    }
}

/// A payoff vector aligned index-for-index with the outcomes of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct Position<T: Scalar = f64> {
    values: Vec<T>,
}

impl<T: Scalar> Position<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::invalid("position", "no outcomes"));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::invalid("position", format!("entry {k} is not finite")));
        }
        Ok(Self { values })
    }

    pub fn constant(n: usize, c: T) -> Self {
        Self { values: vec![c; n] }
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, T::zero())
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn min_value(&self) -> T {
        self.values
            .iter()
            .cloned()
            .min_by(cmp)
            .expect("positions are non-empty")
    }

    pub fn max_value(&self) -> T {
        self.values
            .iter()
            .cloned()
            .max_by(cmp)
            .expect("positions are non-empty")
    }

    pub fn add(&self, other: &Position<T>) -> Result<Position<T>> {
        check_len(self.len(), other.len())?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        })
    }

    pub fn scale(&self, lambda: T) -> Position<T> {
        Self {
            values: self.values.iter().map(|v| v.clone() * lambda.clone()).collect(),
        }
    }

    pub fn shift(&self, c: T) -> Position<T> {
        Self {
            values: self.values.iter().map(|v| v.clone() + c.clone()).collect(),
        }
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn convex_combination(&self, other: &Position<T>, lambda: T) -> Result<Position<T>> {
        let rest = T::one() - lambda.clone();
        self.scale(lambda).add(&other.scale(rest))
    }

    /// `max_k |X_k - Y_k|`.
    pub fn sup_distance(&self, other: &Position<T>) -> Result<T> {
        check_len(self.len(), other.len())?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.clone() - b.clone()).abs())
            .fold(T::zero(), crate::scalar::max_of))
    }

    /// Position whose outcome `k` carries `self[perm[k]]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Position<T>> {
        check_len(self.len(), perm.len())?;
        let values = perm
            .iter()
            .map(|&j| {
                self.values
                    .get(j)
                    .cloned()
                    .ok_or_else(|| Error::domain(format!("permutation index {j} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { values })
    }

    pub fn map_scalar<U: Scalar>(&self) -> Position<U> {
        Position {
            values: self.values.iter().map(|v| U::from_f64(v.to_f64())).collect(),
        }
    }
}

/// One atom of a step distribution: a support value and `F(value)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Atom<T: Scalar = f64> {
    pub value: T,
    pub cumulative: T,
}

/// The distribution function `F_{X,Q}` of a position under a scenario,
/// stored as its sorted support with cumulative masses.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution<T: Scalar = f64> {
    atoms: Vec<Atom<T>>,
}

impl<T: Scalar> Distribution<T> {
    pub fn atoms(&self) -> &[Atom<T>] {
        &self.atoms
    }

    /// `(value, mass)` pairs in ascending value order.
    pub fn masses(&self) -> impl Iterator<Item = (T, T)> + '_ {
        let mut prev = T::zero();
        self.atoms.iter().map(move |a| {
            let mass = a.cumulative.clone() - prev.clone();
            prev = a.cumulative.clone();
            (a.value.clone(), mass)
        })
    }

    /// Smallest support value (`ess inf`).
    pub fn min_value(&self) -> T {
        self.atoms[0].value.clone()
    }

    pub fn max_value(&self) -> T {
        self.atoms[self.atoms.len() - 1].value.clone()
    }

    pub fn mean(&self) -> T {
        self.masses()
            .fold(T::zero(), |acc, (v, m)| acc + v * m)
    }

    /// Left-continuous inverse `F^{-1}(alpha) = inf{x : F(x) >= alpha}`, with
    /// `F^{-1}(0)` the smallest support value.
    pub fn quantile(&self, alpha: &T) -> Result<T> {
        check_level(alpha)?;
        if alpha.is_zero() {
            return Ok(self.min_value());
        }
        let target = alpha.clone() - T::tol(PROB_TOL);
        let atom = self
            .atoms
            .iter()
            .find(|a| a.cumulative >= target)
            .unwrap_or_else(|| self.atoms.last().expect("non-empty distribution"));
        Ok(atom.value.clone())
    }

    /// `int_0^alpha F^{-1}(s) ds`, exact on the quantile steps.
    pub fn integrated_quantile(&self, alpha: &T) -> Result<T> {
        check_level(alpha)?;
        let mut acc = T::zero();
        let mut lo = T::zero();
        for atom in &self.atoms {
            if lo >= *alpha {
                break;
            }
            let hi = crate::scalar::min_of(atom.cumulative.clone(), alpha.clone());
            if hi > lo {
                acc = acc + atom.value.clone() * (hi.clone() - lo);
            }
            lo = atom.cumulative.clone();
        }
        Ok(acc)
    }

    /// Cumulative levels at which the quantile function jumps (always ends at 1).
    pub fn breakpoints(&self) -> Vec<T> {
        self.atoms.iter().map(|a| a.cumulative.clone()).collect()
    }

    /// Same support and cumulative masses up to `tol`.
    pub fn approx_eq(&self, other: &Distribution<T>, tol: &T) -> bool {
        self.atoms.len() == other.atoms.len()
            && self.atoms.iter().zip(&other.atoms).all(|(a, b)| {
                (a.value.clone() - b.value.clone()).abs() <= *tol
                    && (a.cumulative.clone() - b.cumulative.clone()).abs() <= *tol
            })
    }
}

pub(crate) fn check_level<T: Scalar>(alpha: &T) -> Result<()> {
    if alpha.lt_zero() || *alpha > T::one() || !alpha.is_finite_value() {
        return Err(Error::domain(format!("level {alpha} outside [0, 1]")));
    }
    Ok(())
}

/// `F_{X,Q}`: aggregates equal payoffs and drops outcomes with zero mass.
pub fn distribution<T: Scalar>(x: &Position<T>, q: &ScenarioMeasure<T>) -> Result<Distribution<T>> {
    check_len(q.len(), x.len())?;
    let mut pairs: Vec<(T, T)> = x
        .values()
        .iter()
        .zip(q.probs())
        .filter(|(_, p)| p.gt_zero())
        .map(|(v, p)| (v.clone(), p.clone()))
        .collect();
    pairs.sort_by(|a, b| cmp(&a.0, &b.0));

    let mut atoms: Vec<Atom<T>> = Vec::with_capacity(pairs.len());
    let mut cumulative = T::zero();
    for (value, mass) in pairs {
        cumulative = cumulative + mass;
        match atoms.last_mut() {
            Some(last) if last.value == value => last.cumulative = cumulative.clone(),
            _ => atoms.push(Atom {
                value,
                cumulative: cumulative.clone(),
            }),
        }
    }
    if let Some(last) = atoms.last_mut() {
        last.cumulative = T::one();
    }
    Ok(Distribution { atoms })
}

/// `F^{-1}(alpha)` of a distribution.
pub fn quantile<T: Scalar>(f: &Distribution<T>, alpha: &T) -> Result<T> {
    f.quantile(alpha)
}

/// `(X(w) - X(w'))(Y(w) - Y(w')) >= 0` for every pair of outcomes.
pub fn is_comonotone<T: Scalar>(x: &Position<T>, y: &Position<T>) -> Result<bool> {
    check_len(x.len(), y.len())?;
    let (xs, ys) = (x.values(), y.values());
    for i in 0..xs.len() {
        for j in (i + 1)..xs.len() {
            let dx = xs[i].clone() - xs[j].clone();
            let dy = ys[i].clone() - ys[j].clone();
            if (dx * dy).lt_zero() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn canonical() -> Position {
        Position::new(vec![-10.0, -5.0, 0.0, 5.0]).unwrap()
    }

    fn atoms(d: &Distribution) -> Vec<(f64, f64)> {
        d.atoms().iter().map(|a| (a.value, a.cumulative)).collect()
    }

    #[test]
    fn uniform_distribution_accumulates() {
        let q = ScenarioMeasure::uniform(4).unwrap();
        let d = distribution(&canonical(), &q).unwrap();
        assert_eq!(atoms(&d), vec![(-10.0, 0.25), (-5.0, 0.5), (0.0, 0.75), (5.0, 1.0)]);
    }

    #[test]
    fn constant_position_has_one_atom() {
        let q = ScenarioMeasure::new(vec![0.1, 0.2, 0.3, 0.4]).unwrap();
        let d = distribution(&Position::constant(4, 1.0), &q).unwrap();
        assert_eq!(atoms(&d), vec![(1.0, 1.0)]);
    }

    #[test]
    fn skewed_distribution_accumulates() {
        let q = ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
        let d = distribution(&canonical(), &q).unwrap();
        let got = atoms(&d);
        let want = [(-10.0, 0.4), (-5.0, 0.7), (0.0, 0.9), (5.0, 1.0)];
        for (g, w) in got.iter().zip(&want) {
            assert_eq!(g.0, w.0);
            assert!((g.1 - w.1).abs() < 1e-15);
        }
    }

    #[test]
    fn zero_mass_outcomes_are_ignored() {
        let q = ScenarioMeasure::new(vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        let d = distribution(&canonical(), &q).unwrap();
        assert_eq!(atoms(&d), vec![(-10.0, 0.5), (0.0, 1.0)]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let q = ScenarioMeasure::<f64>::uniform(3).unwrap();
        assert_eq!(
            distribution(&canonical(), &q),
            Err(Error::DimensionMismatch { expected: 3, actual: 4 })
        );
    }

    #[test]
    fn quantile_follows_inf_definition() {
        let q = ScenarioMeasure::uniform(4).unwrap();
        let d = distribution(&canonical(), &q).unwrap();
        assert_eq!(d.quantile(&0.25).unwrap(), -10.0);
        assert_eq!(d.quantile(&0.26).unwrap(), -5.0);
        assert_eq!(d.quantile(&0.0).unwrap(), -10.0);
        assert_eq!(d.quantile(&1.0).unwrap(), 5.0);
        assert!(matches!(d.quantile(&1.5), Err(Error::Domain(_))));
        assert!(matches!(d.quantile(&-0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_quantile_at_jump() {
        let q = ScenarioMeasure::<Rational>::uniform(4).unwrap();
        let x = canonical().map_scalar::<Rational>();
        let d = distribution(&x, &q).unwrap();
        assert_eq!(d.quantile(&ratio(1, 4)).unwrap(), ratio(-10, 1));
        assert_eq!(d.quantile(&ratio(26, 100)).unwrap(), ratio(-5, 1));
        assert_eq!(d.integrated_quantile(&ratio(1, 2)).unwrap(), ratio(-15, 4));
    }

    #[test]
    fn comonotonicity() {
        let x = canonical();
        let y = Position::new(vec![-1.0, 0.0, 0.0, 3.0]).unwrap();
        let z = Position::new(vec![5.0, 0.0, -5.0, -10.0]).unwrap();
        assert!(is_comonotone(&x, &y).unwrap());
        assert!(!is_comonotone(&x, &z).unwrap());
        assert!(is_comonotone(&Position::constant(4, 1.0), &z).unwrap());
    }

    #[test]
    fn space_invariants() {
        let ids = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        assert!(FiniteProbSpace::new(ids(&["a", "b"]), vec![0.5, 0.5]).is_ok());
        assert!(FiniteProbSpace::new(ids(&["a", "a"]), vec![0.5, 0.5]).is_err());
        assert!(FiniteProbSpace::new(ids(&["a", "b"]), vec![0.5, 0.4]).is_err());
        assert!(FiniteProbSpace::new(ids(&["a", "b"]), vec![1.5, -0.5]).is_err());
        assert!(FiniteProbSpace::<f64>::new(vec![], vec![]).is_err());

        let space = FiniteProbSpace::new(ids(&["a", "b", "c"]), vec![0.5, 0.5, 0.0]).unwrap();
        assert!(space.scenario(vec![0.2, 0.8, 0.0]).is_ok());
        assert!(space.scenario(vec![0.2, 0.7, 0.1]).is_err());
    }
}
