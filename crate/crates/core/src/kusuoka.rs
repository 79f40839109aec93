//! ES-mixture (Kusuoka) representations.
//!
//! A comonotone law-invariant coherent risk functional is an average of
//! Expected Shortfalls, `rho(X) = sum_j m_j ES(alpha_j)(X)`, or equivalently a
//! spectral functional with the nonincreasing weight
//! `phi(u) = sum_{alpha_j > u} m_j / alpha_j`. Both objects are stored as
//! finite step data so that the conversions below are exact.
//!
//! The module also checks the composed representations over a scenario set:
//! for a mixture combination the profile-mixed ES curve
//! `ES^mu_alpha(X) = sum_i mu_i ES^{Q_i}_alpha(X)` integrated against the
//! component measure reproduces the composed value exactly, while for the
//! worst case only an upper bound over an ES-mixture grid is available.

use serde::{Deserialize, Serialize};

use crate::combinators::{combine, CombinationSpec, IndexWeight};
use crate::error::{check_len, Error, Result};
use crate::measures::{evaluate, expected_shortfall, RiskMeasureSpec};
use crate::prob::{distribution, Position, ScenarioMeasure};
use crate::scalar::{cmp, min_of, sum, Scalar};

const SPECTRUM_TOL: f64 = 1e-10;
const MIXTURE_TOL: f64 = 1e-12;

/// A right-continuous step weight on `[0, 1]`: level `steps[k].1` on
/// `[steps[k].0, steps[k+1].0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T: Scalar = f64> {
    steps: Vec<(T, T)>,
}

impl<T: Scalar> Spectrum<T> {
    /// Builds a spectrum from `(start, level)` breakpoints. The first start must
    /// be 0, starts must increase strictly inside `[0, 1)`, levels must be
    /// nonnegative and the weight must integrate to 1.
    pub fn new(steps: Vec<(T, T)>) -> Result<Self> {
        let spectrum = Self::unnormalized(steps)?;
        let total = spectrum.cumulative(&T::one());
        if (total.clone() - T::one()).abs() > T::tol(SPECTRUM_TOL) {
            return Err(Error::invalid("spectrum", format!("integrates to {total}, not 1")));
        }
        Ok(spectrum)
    }

    fn unnormalized(steps: Vec<(T, T)>) -> Result<Self> {
        let first = steps
            .first()
            .ok_or_else(|| Error::invalid("spectrum", "no breakpoints"))?;
        if !first.0.is_zero() {
            return Err(Error::invalid("spectrum", "first breakpoint must start at 0"));
        }
        for w in steps.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::invalid("spectrum", "breakpoints must increase strictly"));
            }
        }
        if steps.last().is_some_and(|s| s.0 >= T::one()) {
            return Err(Error::invalid("spectrum", "breakpoints must lie in [0, 1)"));
        }
        if let Some((_, level)) = steps
            .iter()
            .find(|(_, level)| level.lt_zero() || !level.is_finite_value())
        {
            return Err(Error::invalid("spectrum", format!("level {level} is not a finite nonnegative number")));
        }
        let mut canonical: Vec<(T, T)> = Vec::with_capacity(steps.len());
        for (start, level) in steps {
            match canonical.last() {
                Some((_, prev)) if *prev == level => {}
                _ => canonical.push((start, level)),
            }
        }
        Ok(Self { steps: canonical })
    }

    /// The flat spectrum of `ES(alpha)`: `1/alpha` on `[0, alpha)`.
    pub fn expected_shortfall(alpha: T) -> Result<Self> {
        if !alpha.gt_zero() || alpha > T::one() {
            return Err(Error::domain(format!("ES spectrum needs alpha in (0, 1], got {alpha}")));
        }
        let level = T::one() / alpha.clone();
        if alpha == T::one() {
            Self::new(vec![(T::zero(), level)])
        } else {
            Self::new(vec![(T::zero(), level), (alpha, T::zero())])
        }
    }

    pub fn steps(&self) -> &[(T, T)] {
        &self.steps
    }

    /// End of step `k` (1 for the last step).
    fn step_end(&self, k: usize) -> T {
        self.steps
            .get(k + 1)
            .map(|s| s.0.clone())
            .unwrap_or_else(T::one)
    }

    pub fn level_at(&self, u: &T) -> T {
        self.steps
            .iter()
            .take_while(|(start, _)| start <= u)
            .last()
            .map(|(_, level)| level.clone())
            .unwrap_or_else(T::zero)
    }

    /// `Phi(t) = int_0^t phi(s) ds`, a concave distortion when `phi` is
    /// nonincreasing.
    pub fn cumulative(&self, t: &T) -> T {
        let mut acc = T::zero();
        for (k, (start, level)) in self.steps.iter().enumerate() {
            if start >= t {
                break;
            }
            let end = min_of(self.step_end(k), t.clone());
            acc = acc + level.clone() * (end - start.clone());
        }
        acc
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.steps.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn map_scalar<U: Scalar>(&self) -> Spectrum<U> {
        Spectrum {
            steps: self
                .steps
                .iter()
                .map(|(s, l)| (U::from_f64(s.to_f64()), U::from_f64(l.to_f64())))
                .collect(),
        }
    }
}

/// A finitely supported probability measure on `(0, 1]`: weights over ES levels.
#[derive(Debug, Clone, PartialEq)]
pub struct EsMixtureMeasure<T: Scalar = f64> {
    atoms: Vec<(T, T)>,
}

impl<T: Scalar> EsMixtureMeasure<T> {
    /// Builds a measure from `(alpha, mass)` pairs. Levels are sorted, repeated
    /// levels merged and zero masses dropped.
    pub fn new(atoms: Vec<(T, T)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::invalid("ES mixture", "no atoms"));
        }
        for (alpha, mass) in &atoms {
            if !alpha.gt_zero() || *alpha > T::one() {
                return Err(Error::invalid("ES mixture", format!("level {alpha} outside (0, 1]")));
            }
            if mass.lt_zero() || !mass.is_finite_value() {
                return Err(Error::invalid("ES mixture", format!("mass {mass} is negative")));
            }
        }
        let total = sum(atoms.iter().map(|(_, m)| m));
        if (total.clone() - T::one()).abs() > T::tol(MIXTURE_TOL) {
            return Err(Error::invalid("ES mixture", format!("masses sum to {total}, not 1")));
        }
        Ok(Self::canonical(atoms))
    }

    fn canonical(mut atoms: Vec<(T, T)>) -> Self {
        atoms.sort_by(|a, b| cmp(&a.0, &b.0));
        let mut merged: Vec<(T, T)> = Vec::with_capacity(atoms.len());
        for (alpha, mass) in atoms {
            if mass.is_zero() {
                continue;
            }
            match merged.last_mut() {
                Some(last) if last.0 == alpha => last.1 = last.1.clone() + mass,
                _ => merged.push((alpha, mass)),
            }
        }
        Self { atoms: merged }
    }

    /// `delta_alpha`.
    pub fn dirac(alpha: T) -> Result<Self> {
        Self::new(vec![(alpha, T::one())])
    }

    pub fn atoms(&self) -> &[(T, T)] {
        &self.atoms
    }

    pub fn map_scalar<U: Scalar>(&self) -> EsMixtureMeasure<U> {
        EsMixtureMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|(a, m)| (U::from_f64(a.to_f64()), U::from_f64(m.to_f64())))
                .collect(),
        }
    }

    /// Same atoms up to `tol` in level and mass.
    pub fn approx_eq(&self, other: &Self, tol: &T) -> bool {
        self.atoms.len() == other.atoms.len()
            && self.atoms.iter().zip(&other.atoms).all(|(a, b)| {
                (a.0.clone() - b.0.clone()).abs() <= *tol && (a.1.clone() - b.1.clone()).abs() <= *tol
            })
    }
}

/// `phi(u) = sum_{alpha_j > u} m_j / alpha_j`.
pub fn phi_from_m<T: Scalar>(m: &EsMixtureMeasure<T>) -> Spectrum<T> {
    // Levels are constant on [alpha_{j-1}, alpha_j) and drop by m_j/alpha_j at alpha_j.
    let mut steps = Vec::with_capacity(m.atoms.len() + 1);
    let mut remaining: T = m
        .atoms
        .iter()
        .fold(T::zero(), |acc, (a, w)| acc + w.clone() / a.clone());
    let mut start = T::zero();
    for (alpha, mass) in &m.atoms {
        steps.push((start.clone(), remaining.clone()));
        remaining = remaining - mass.clone() / alpha.clone();
        start = alpha.clone();
    }
    if start < T::one() {
        steps.push((start, T::zero()));
    }
    // `remaining` is exactly zero in exact arithmetic; clamp float residue.
    let steps = steps
        .into_iter()
        .map(|(s, l)| if l.lt_zero() { (s, T::zero()) } else { (s, l) })
        .collect();
    Spectrum::unnormalized(steps).expect("levels derived from a valid mixture")
}

/// Inverse of [`phi_from_m`]: a drop of `delta` at level `alpha` becomes mass
/// `alpha * delta`, and the terminal level becomes mass at 1.
pub fn m_from_phi<T: Scalar>(phi: &Spectrum<T>) -> Result<EsMixtureMeasure<T>> {
    if !phi.is_nonincreasing() {
        return Err(Error::domain(
            "spectrum is not nonincreasing; no ES-mixture representation exists",
        ));
    }
    let steps = phi.steps();
    let mut atoms = Vec::with_capacity(steps.len());
    for (k, (_, level)) in steps.iter().enumerate() {
        let next_level = steps.get(k + 1).map(|s| s.1.clone());
        let end = phi.step_end(k);
        let drop = match next_level {
            Some(next) => level.clone() - next,
            None => level.clone(),
        };
        if drop.gt_zero() {
            atoms.push((end.clone(), end * drop));
        }
    }
    EsMixtureMeasure::new(atoms)
}

/// `sum_j m_j ES(alpha_j)(X)` under `Q`.
pub fn es_mixture_evaluate<T: Scalar>(
    m: &EsMixtureMeasure<T>,
    x: &Position<T>,
    q: &ScenarioMeasure<T>,
) -> Result<T> {
    let dist = distribution(x, q)?;
    m.atoms.iter().try_fold(T::zero(), |acc, (alpha, mass)| {
        Ok(acc + mass.clone() * expected_shortfall(&dist, alpha)?)
    })
}

/// `phi^mu = sum_i mu_i phi^i`, pointwise on the merged breakpoints.
pub fn mixture_spectrum<T: Scalar>(spectra: &[Spectrum<T>], mu: &IndexWeight<T>) -> Result<Spectrum<T>> {
    check_len(mu.len(), spectra.len())?;
    let mut starts: Vec<T> = spectra
        .iter()
        .flat_map(|s| s.steps.iter().map(|(start, _)| start.clone()))
        .collect();
    starts.sort_by(cmp);
    starts.dedup();
    let steps = starts
        .into_iter()
        .map(|start| {
            let level = spectra
                .iter()
                .zip(mu.weights())
                .fold(T::zero(), |acc, (s, w)| acc + w.clone() * s.level_at(&start));
            (start, level)
        })
        .collect();
    Spectrum::new(steps)
}

/// `0` when `sum_i mu_i m^i = m` atom-for-atom, `+inf` otherwise.
pub fn beta_penalty<T: Scalar>(
    components: &[EsMixtureMeasure<T>],
    mu: &IndexWeight<T>,
    m: &EsMixtureMeasure<T>,
) -> Result<crate::duality::PenaltyValue<T>> {
    check_len(mu.len(), components.len())?;
    let mixed: Vec<(T, T)> = components
        .iter()
        .zip(mu.weights())
        .flat_map(|(c, w)| c.atoms.iter().map(move |(a, mass)| (a.clone(), w.clone() * mass.clone())))
        .collect();
    let mixed = EsMixtureMeasure::canonical(mixed);
    Ok(if mixed.approx_eq(m, &T::tol(MIXTURE_TOL)) {
        crate::duality::PenaltyValue::zero()
    } else {
        crate::duality::PenaltyValue::Infinite
    })
}

/// ES-mixture measure of a comonotone coherent spec (`ES`, `EL`, spectral,
/// ES-mixture).
pub fn mixture_measure_of<T: Scalar>(spec: &RiskMeasureSpec<T>) -> Result<EsMixtureMeasure<T>> {
    match spec {
        RiskMeasureSpec::ExpectedLoss => EsMixtureMeasure::dirac(T::one()),
        RiskMeasureSpec::ExpectedShortfall(alpha) if alpha.gt_zero() => {
            EsMixtureMeasure::dirac(alpha.clone())
        }
        RiskMeasureSpec::Spectral(phi) => m_from_phi(phi),
        RiskMeasureSpec::EsMixture(m) => Ok(m.clone()),
        other => Err(Error::Unsupported(format!(
            "{} has no finitely supported ES-mixture representation",
            other.label()
        ))),
    }
}

/// `ES^mu_alpha(X) = sum_i mu_i ES^{Q_i}_alpha(X)`.
pub fn mixed_expected_shortfall<T: Scalar>(
    alpha: &T,
    x: &Position<T>,
    scenarios: &[ScenarioMeasure<T>],
    mu: &[T],
) -> Result<T> {
    check_len(scenarios.len(), mu.len())?;
    scenarios.iter().zip(mu).try_fold(T::zero(), |acc, (q, w)| {
        Ok(acc + w.clone() * expected_shortfall(&distribution(x, q)?, alpha)?)
    })
}

/// Outcome of [`law_invariant_composed_check`].
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct KusuokaCheckReport {
    pub combination: String,
    /// `rho(X) = f(rho^{Q_1}(X), ..., rho^{Q_n}(X))`.
    pub lhs: f64,
    /// Largest `sum_j m_j ES^mu_{alpha_j}(X)` over the admissible candidates.
    pub rhs: f64,
    /// `rhs - lhs`.
    pub gap: f64,
    /// Weights on the scenarios at the maximizing candidate.
    pub argmax_mu: Vec<f64>,
    /// ES-mixture atoms `(alpha, mass)` at the maximizing candidate.
    pub argmax_m: Vec<(f64, f64)>,
    /// Whether `lhs == rhs` was asserted (mixtures) or only `lhs <= rhs`
    /// (worst case, where the bound is generally strict).
    pub equality_asserted: bool,
    pub passed: bool,
}

/// Checks the ES-mixture representation of `f(rho^{Q_1}, ..., rho^{Q_n})`
/// for a comonotone coherent `spec` applied under every scenario.
///
/// * `Mixture(mu)`: the only admissible measure is the component's own `m`,
///   and `rho(X) = sum_j m_j ES^mu_{alpha_j}(X)` must hold to `tol`.
/// * `WorstCase`: candidates are the vertices `delta_i` paired with the
///   component measure and with `delta_alpha` for every grid level;
///   `rho(X) <= max` is asserted and the gap reported.
pub fn law_invariant_composed_check(
    f: &CombinationSpec,
    spec: &RiskMeasureSpec,
    scenarios: &[ScenarioMeasure],
    x: &Position,
    alpha_grid: &[f64],
    tol: f64,
) -> Result<KusuokaCheckReport> {
    if scenarios.is_empty() {
        return Err(Error::domain("empty scenario set"));
    }
    let m = mixture_measure_of(spec)?;
    let profile = scenarios
        .iter()
        .map(|q| evaluate(spec, x, q).map(|v| v.value))
        .collect::<Result<Vec<_>>>()?;
    let lhs = combine(f, &crate::combinators::RiskProfile::new(profile)?)?;

    let integrate = |m: &EsMixtureMeasure, mu: &[f64]| -> Result<f64> {
        m.atoms.iter().try_fold(0.0, |acc, (alpha, mass)| {
            Ok(acc + mass * mixed_expected_shortfall(alpha, x, scenarios, mu)?)
        })
    };

    match f {
        CombinationSpec::Mixture(mu) => {
            check_len(scenarios.len(), mu.len())?;
            let rhs = integrate(&m, mu.weights())?;
            let gap = rhs - lhs;
            Ok(KusuokaCheckReport {
                combination: f.label(),
                lhs,
                rhs,
                gap,
                argmax_mu: mu.weights().to_vec(),
                argmax_m: m.atoms.clone(),
                equality_asserted: true,
                passed: gap.abs() <= tol,
            })
        }
        CombinationSpec::WorstCase => {
            let mut candidates = vec![m.clone()];
            for &alpha in alpha_grid {
                candidates.push(EsMixtureMeasure::dirac(alpha)?);
            }
            let mut best: Option<(f64, Vec<f64>, EsMixtureMeasure)> = None;
            for i in 0..scenarios.len() {
                let mut vertex = vec![0.0; scenarios.len()];
                vertex[i] = 1.0;
                for cand in &candidates {
                    let value = integrate(cand, &vertex)?;
                    if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
                        best = Some((value, vertex.clone(), cand.clone()));
                    }
                }
            }
            let (rhs, mu, m_star) = best.expect("at least one scenario and candidate");
            Ok(KusuokaCheckReport {
                combination: f.label(),
                lhs,
                rhs,
                gap: rhs - lhs,
                argmax_mu: mu,
                argmax_m: m_star.atoms,
                equality_asserted: false,
                passed: lhs <= rhs + tol,
            })
        }
        CombinationSpec::UtilityOfProfile { .. } => Err(Error::Unsupported(
            "ES-mixture composed check supports WorstCase and Mixture only".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn r(n: i64, d: i64) -> Rational {
        ratio(n, d)
    }

    #[test]
    fn phi_of_single_atom() {
        let phi = phi_from_m(&EsMixtureMeasure::dirac(r(1, 2)).unwrap());
        assert_eq!(phi.steps(), &[(r(0, 1), r(2, 1)), (r(1, 2), r(0, 1))]);
        let phi = phi_from_m(&EsMixtureMeasure::dirac(r(1, 1)).unwrap());
        assert_eq!(phi.steps(), &[(r(0, 1), r(1, 1))]);
    }

    #[test]
    fn phi_of_two_atoms() {
        let m = EsMixtureMeasure::new(vec![(r(1, 2), r(1, 2)), (r(1, 4), r(1, 2))]).unwrap();
        let phi = phi_from_m(&m);
        assert_eq!(
            phi.steps(),
            &[(r(0, 1), r(3, 1)), (r(1, 4), r(1, 1)), (r(1, 2), r(0, 1))]
        );
        assert_eq!(m_from_phi(&phi).unwrap(), m);
    }

    #[test]
    fn m_of_flat_spectra() {
        let phi = Spectrum::new(vec![(r(0, 1), r(2, 1)), (r(1, 2), r(0, 1))]).unwrap();
        assert_eq!(m_from_phi(&phi).unwrap(), EsMixtureMeasure::dirac(r(1, 2)).unwrap());
        let phi = Spectrum::new(vec![(r(0, 1), r(1, 1))]).unwrap();
        assert_eq!(m_from_phi(&phi).unwrap(), EsMixtureMeasure::dirac(r(1, 1)).unwrap());
    }

    #[test]
    fn increasing_spectrum_has_no_mixture() {
        let phi = Spectrum::new(vec![(0.0, 0.0), (0.5, 2.0)]).unwrap();
        assert!(matches!(m_from_phi(&phi), Err(Error::Domain(_))));
    }

    #[test]
    fn spectrum_validation() {
        assert!(Spectrum::new(vec![(0.0, 2.0), (0.5, 0.0)]).is_ok());
        assert!(Spectrum::new(vec![(0.0, 1.0), (0.5, 0.0)]).is_err());
        assert!(Spectrum::new(vec![(0.1, 1.0)]).is_err());
        assert!(Spectrum::new(vec![(0.0, -1.0), (0.5, 3.0)]).is_err());
        assert!(Spectrum::new(vec![(0.0, 2.0), (0.5, 0.0), (0.5, 0.0)]).is_err());
    }

    #[test]
    fn mixture_validation() {
        assert!(EsMixtureMeasure::new(vec![(0.0, 1.0)]).is_err());
        assert!(EsMixtureMeasure::new(vec![(0.5, 0.6)]).is_err());
        assert!(EsMixtureMeasure::new(vec![(1.5, 1.0)]).is_err());
        let m = EsMixtureMeasure::new(vec![(0.5, 0.25), (0.25, 0.5), (0.5, 0.25), (0.9, 0.0)]).unwrap();
        assert_eq!(m.atoms(), &[(0.25, 0.5), (0.5, 0.5)]);
    }

    #[test]
    fn mixture_of_flat_spectra() {
        let s1 = Spectrum::expected_shortfall(r(1, 2)).unwrap();
        let s2 = Spectrum::expected_shortfall(r(1, 4)).unwrap();
        let mu = IndexWeight::new(vec![r(1, 2), r(1, 2)]).unwrap();
        let mixed = mixture_spectrum(&[s1.clone(), s2], &mu).unwrap();
        assert_eq!(
            mixed.steps(),
            &[(r(0, 1), r(3, 1)), (r(1, 4), r(1, 1)), (r(1, 2), r(0, 1))]
        );
        let point = IndexWeight::new(vec![r(1, 1), r(0, 1)]).unwrap();
        let s3 = Spectrum::expected_shortfall(r(1, 4)).unwrap();
        assert_eq!(mixture_spectrum(&[s1.clone(), s3], &point).unwrap(), s1);
        assert_eq!(mixture_spectrum(&[s1.clone(), s1.clone()], &mu).unwrap(), s1);
    }

    #[test]
    fn es_mixture_values_on_canonical_position() {
        let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0]).unwrap();
        let q = ScenarioMeasure::uniform(4).unwrap();
        let v = |m: EsMixtureMeasure| es_mixture_evaluate(&m, &x, &q).unwrap();
        assert_eq!(v(EsMixtureMeasure::dirac(0.5).unwrap()), 7.5);
        assert_eq!(v(EsMixtureMeasure::dirac(1.0).unwrap()), 2.5);
        assert_eq!(v(EsMixtureMeasure::new(vec![(0.5, 0.5), (0.25, 0.5)]).unwrap()), 8.75);
    }

    #[test]
    fn beta_penalty_decomposition() {
        let m1 = EsMixtureMeasure::dirac(r(1, 2)).unwrap();
        let m2 = EsMixtureMeasure::dirac(r(1, 4)).unwrap();
        let mu = IndexWeight::new(vec![r(1, 2), r(1, 2)]).unwrap();
        let target = EsMixtureMeasure::new(vec![(r(1, 2), r(1, 2)), (r(1, 4), r(1, 2))]).unwrap();
        let comps = [m1.clone(), m2];
        assert!(beta_penalty(&comps, &mu, &target).unwrap().is_zero());
        assert!(beta_penalty(&comps, &mu, &m1).unwrap().is_infinite());
        let point = IndexWeight::new(vec![r(1, 1), r(0, 1)]).unwrap();
        assert!(beta_penalty(&comps, &point, &m1).unwrap().is_zero());
    }

    fn two_scenarios() -> (Position, Vec<ScenarioMeasure>) {
        let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0]).unwrap();
        let qs = vec![
            ScenarioMeasure::uniform(4).unwrap(),
            ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap(),
        ];
        (x, qs)
    }

    #[test]
    fn mixture_composed_equality() {
        let (x, qs) = two_scenarios();
        let f = CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5]).unwrap());
        let spec = RiskMeasureSpec::ExpectedShortfall(0.5);
        let report = law_invariant_composed_check(&f, &spec, &qs, &x, &[], 1e-10).unwrap();
        assert!((report.lhs - 8.25).abs() < 1e-12);
        assert!((report.rhs - 8.25).abs() < 1e-12);
        assert!(report.passed && report.equality_asserted);
    }

    #[test]
    fn point_mixture_reduces_to_single_scenario() {
        let (x, qs) = two_scenarios();
        let f = CombinationSpec::Mixture(IndexWeight::new(vec![1.0, 0.0]).unwrap());
        let spec = RiskMeasureSpec::ExpectedShortfall(0.5);
        let report = law_invariant_composed_check(&f, &spec, &qs, &x, &[], 1e-12).unwrap();
        assert_eq!(report.lhs, 7.5);
        assert!(report.passed);
    }

    #[test]
    fn worst_case_bound_with_gap() {
        let (x, qs) = two_scenarios();
        let spec = RiskMeasureSpec::ExpectedShortfall(0.5);
        let grid: Vec<f64> = (1..=20).map(|k| k as f64 / 20.0).collect();
        let report =
            law_invariant_composed_check(&CombinationSpec::WorstCase, &spec, &qs, &x, &grid, 1e-10).unwrap();
        assert!((report.lhs - 9.0).abs() < 1e-12);
        assert!(report.rhs >= report.lhs);
        assert!(report.gap > 0.0);
        assert!(report.passed && !report.equality_asserted);
    }
}
