//! Base risk measures as probability-based risk functionals: every kind is a
//! function of the distribution `F_{X,Q}` alone, so the same spec can be
//! read under any scenario measure.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::combinators::RiskProfile;
use crate::error::{check_len, Error, Result};
use crate::kusuoka::{EsMixtureMeasure, Spectrum};
use crate::prob::{check_level, distribution, Distribution, Position, ScenarioMeasure};
use crate::scalar::{cmp, min_of, Scalar};

/// A risk functional, interpretable under any scenario measure.
#[derive(Debug, Clone, PartialEq)]
pub enum RiskMeasureSpec<T: Scalar = f64> {
    /// `-E_Q[X]`.
    ExpectedLoss,
    /// `-F^{-1}(alpha)`.
    ValueAtRisk(T),
    /// `(1/alpha) int_0^alpha VaR^s ds`, with `ES(0) = ML`.
    ExpectedShortfall(T),
    /// `-F^{-1}(0)`, the worst attainable payoff.
    MaxLoss,
    /// `int_0^1 VaR^u phi(u) du`.
    Spectral(Spectrum<T>),
    /// `sum_j m_j ES(alpha_j)`.
    EsMixture(EsMixtureMeasure<T>),
}

impl<T: Scalar> RiskMeasureSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            RiskMeasureSpec::ValueAtRisk(alpha) | RiskMeasureSpec::ExpectedShortfall(alpha) => {
                check_level(alpha)
            }
            _ => Ok(()),
        }
    }

    /// Monotone, translation invariant, convex and positively homogeneous.
    pub fn is_coherent(&self) -> bool {
        match self {
            RiskMeasureSpec::ValueAtRisk(_) => false,
            RiskMeasureSpec::Spectral(phi) => phi.is_nonincreasing(),
            _ => true,
        }
    }

    pub fn is_convex(&self) -> bool {
        self.is_coherent()
    }

    /// Short human label such as `ES(0.5)`.
    pub fn label(&self) -> String {
        match self {
            RiskMeasureSpec::ExpectedLoss => "EL".into(),
            RiskMeasureSpec::ValueAtRisk(a) => format!("VaR({})", a.to_f64()),
            RiskMeasureSpec::ExpectedShortfall(a) => format!("ES({})", a.to_f64()),
            RiskMeasureSpec::MaxLoss => "ML".into(),
            RiskMeasureSpec::Spectral(phi) => {
                let parts: Vec<String> = phi
                    .steps()
                    .iter()
                    .map(|(s, l)| format!("{}:{}", s.to_f64(), l.to_f64()))
                    .collect();
                format!("Spectral[{}]", parts.join(","))
            }
            RiskMeasureSpec::EsMixture(m) => {
                let parts: Vec<String> = m
                    .atoms()
                    .iter()
                    .map(|(a, w)| format!("{}@{}", w.to_f64(), a.to_f64()))
                    .collect();
                format!("ESMixture[{}]", parts.join(","))
            }
        }
    }

    /// Converts the parameters to another numeric backend (through `f64`).
    pub fn map_scalar<U: Scalar>(&self) -> RiskMeasureSpec<U> {
        match self {
            RiskMeasureSpec::ExpectedLoss => RiskMeasureSpec::ExpectedLoss,
            RiskMeasureSpec::ValueAtRisk(a) => RiskMeasureSpec::ValueAtRisk(U::from_f64(a.to_f64())),
            RiskMeasureSpec::ExpectedShortfall(a) => {
                RiskMeasureSpec::ExpectedShortfall(U::from_f64(a.to_f64()))
            }
            RiskMeasureSpec::MaxLoss => RiskMeasureSpec::MaxLoss,
            RiskMeasureSpec::Spectral(phi) => RiskMeasureSpec::Spectral(phi.map_scalar()),
            RiskMeasureSpec::EsMixture(m) => RiskMeasureSpec::EsMixture(m.map_scalar()),
        }
    }
}

impl fmt::Display for RiskMeasureSpec<f64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Shorthand used on the command line: `EL`, `ML`, `VaR:0.25`, `ES:0.5`.
impl FromStr for RiskMeasureSpec<f64> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let level = |arg: Option<&str>| -> Result<f64> {
            let a = arg.ok_or_else(|| Error::domain(format!("`{kind}` needs a level, e.g. {kind}:0.5")))?;
            a.parse::<f64>()
                .map_err(|_| Error::domain(format!("cannot parse level `{a}`")))
        };
        let spec = match kind.to_ascii_uppercase().as_str() {
            "EL" => RiskMeasureSpec::ExpectedLoss,
            "ML" => RiskMeasureSpec::MaxLoss,
            "VAR" => RiskMeasureSpec::ValueAtRisk(level(arg)?),
            "ES" => RiskMeasureSpec::ExpectedShortfall(level(arg)?),
            _ => return Err(Error::domain(format!("unknown measure kind `{kind}`"))),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Wire form: `{"kind":"ES","alpha":0.5}`,
/// `{"kind":"Spectral","breakpoints":[[0.0,2.0],[0.5,0.0]]}`,
/// `{"kind":"ESMixture","atoms":[[0.5,0.5],[0.25,0.5]]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum SpecDoc {
    EL,
    VaR { alpha: f64 },
    ES { alpha: f64 },
    ML,
    Spectral { breakpoints: Vec<(f64, f64)> },
    ESMixture { atoms: Vec<(f64, f64)> },
}

impl TryFrom<SpecDoc> for RiskMeasureSpec<f64> {
    type Error = Error;

    fn try_from(doc: SpecDoc) -> Result<Self> {
        let spec = match doc {
            SpecDoc::EL => RiskMeasureSpec::ExpectedLoss,
            SpecDoc::VaR { alpha } => RiskMeasureSpec::ValueAtRisk(alpha),
            SpecDoc::ES { alpha } => RiskMeasureSpec::ExpectedShortfall(alpha),
            SpecDoc::ML => RiskMeasureSpec::MaxLoss,
            SpecDoc::Spectral { breakpoints } => RiskMeasureSpec::Spectral(Spectrum::new(breakpoints)?),
            SpecDoc::ESMixture { atoms } => RiskMeasureSpec::EsMixture(EsMixtureMeasure::new(atoms)?),
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl From<&RiskMeasureSpec<f64>> for SpecDoc {
    fn from(spec: &RiskMeasureSpec<f64>) -> Self {
        match spec {
            RiskMeasureSpec::ExpectedLoss => SpecDoc::EL,
            RiskMeasureSpec::ValueAtRisk(alpha) => SpecDoc::VaR { alpha: *alpha },
            RiskMeasureSpec::ExpectedShortfall(alpha) => SpecDoc::ES { alpha: *alpha },
            RiskMeasureSpec::MaxLoss => SpecDoc::ML,
            RiskMeasureSpec::Spectral(phi) => SpecDoc::Spectral {
                breakpoints: phi.steps().to_vec(),
            },
            RiskMeasureSpec::EsMixture(m) => SpecDoc::ESMixture {
                atoms: m.atoms().to_vec(),
            },
        }
    }
}

impl Serialize for RiskMeasureSpec<f64> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        SpecDoc::from(self).serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RiskMeasureSpec<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = SpecDoc::deserialize(deserializer)?;
        RiskMeasureSpec::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// A risk value in monetary loss units (positive = risky).
#[derive(Debug, Clone, PartialEq)]
pub struct RiskValue<T: Scalar = f64> {
    pub value: T,
    /// Set when an ES level falls inside the first quantile step, where the
    /// value coincides with `ML`.
    pub tail_within_first_atom: bool,
}

/// `ES(alpha)` of a distribution; `ES(0) = ML`.
pub fn expected_shortfall<T: Scalar>(dist: &Distribution<T>, alpha: &T) -> Result<T> {
    check_level(alpha)?;
    if alpha.is_zero() {
        return Ok(-dist.min_value());
    }
    Ok(-(dist.integrated_quantile(alpha)? / alpha.clone()))
}

/// `int_0^1 F^{-1}(u) phi(u) du`, summed over the cells of the merged
/// breakpoints of the quantile function and the spectrum.
pub(crate) fn spectral_integral<T: Scalar>(dist: &Distribution<T>, phi: &Spectrum<T>) -> T {
    let mut cuts: Vec<T> = dist.breakpoints();
    cuts.extend(phi.steps().iter().map(|(s, _)| s.clone()));
    cuts.push(T::zero());
    cuts.sort_by(cmp);
    cuts.dedup();

    let atoms = dist.atoms();
    let mut acc = T::zero();
    let mut atom = 0;
    for w in cuts.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        // quantile on (lo, hi] is the first atom whose cumulative mass reaches hi
        while atom + 1 < atoms.len() && atoms[atom].cumulative < *hi {
            atom += 1;
        }
        let level = phi.level_at(lo);
        acc = acc + atoms[atom].value.clone() * level * (hi.clone() - lo.clone());
    }
    acc
}

fn first_step<T: Scalar>(dist: &Distribution<T>) -> T {
    dist.atoms()[0].cumulative.clone()
}

/// Evaluates `spec` on `X` under `Q`.
pub fn evaluate<T: Scalar>(
    spec: &RiskMeasureSpec<T>,
    x: &Position<T>,
    q: &ScenarioMeasure<T>,
) -> Result<RiskValue<T>> {
    spec.validate()?;
    let dist = distribution(x, q)?;
    evaluate_distribution(spec, &dist)
}

/// The risk functional `R^rho(F)` applied to a distribution directly.
pub fn evaluate_distribution<T: Scalar>(
    spec: &RiskMeasureSpec<T>,
    dist: &Distribution<T>,
) -> Result<RiskValue<T>> {
    spec.validate()?;
    let mut tail_within_first_atom = false;
    let value = match spec {
        RiskMeasureSpec::ExpectedLoss => -dist.mean(),
        RiskMeasureSpec::ValueAtRisk(alpha) => -dist.quantile(alpha)?,
        RiskMeasureSpec::ExpectedShortfall(alpha) => {
            tail_within_first_atom = *alpha < first_step(dist);
            expected_shortfall(dist, alpha)?
        }
        RiskMeasureSpec::MaxLoss => -dist.min_value(),
        RiskMeasureSpec::Spectral(phi) => -spectral_integral(dist, phi),
        RiskMeasureSpec::EsMixture(m) => {
            let first = first_step(dist);
            m.atoms().iter().try_fold(T::zero(), |acc, (alpha, mass)| {
                tail_within_first_atom |= *alpha < first;
                Ok::<T, Error>(acc + mass.clone() * expected_shortfall(dist, alpha)?)
            })?
        }
    };
    Ok(RiskValue {
        value,
        tail_within_first_atom,
    })
}

/// An indexed family `rho_I = {rho^i}`: each member is a spec read under a
/// scenario measure.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskFamily<T: Scalar = f64> {
    members: Vec<(RiskMeasureSpec<T>, ScenarioMeasure<T>)>,
}

impl<T: Scalar> RiskFamily<T> {
    pub fn new(members: Vec<(RiskMeasureSpec<T>, ScenarioMeasure<T>)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::domain("the index set must be non-empty"));
        }
        let n = members[0].1.len();
        for (spec, q) in &members {
            spec.validate()?;
            check_len(n, q.len())?;
        }
        Ok(Self { members })
    }

    /// One spec across many scenarios, many specs under one scenario, or
    /// equally long lists paired index-for-index.
    pub fn broadcast(specs: &[RiskMeasureSpec<T>], scenarios: &[ScenarioMeasure<T>]) -> Result<Self> {
        let members = match (specs.len(), scenarios.len()) {
            (0, _) | (_, 0) => return Err(Error::domain("the index set must be non-empty")),
            (1, _) => scenarios
                .iter()
                .map(|q| (specs[0].clone(), q.clone()))
                .collect(),
            (_, 1) => specs
                .iter()
                .map(|s| (s.clone(), scenarios[0].clone()))
                .collect(),
            (a, b) if a == b => specs.iter().cloned().zip(scenarios.iter().cloned()).collect(),
            (a, b) => {
                return Err(Error::domain(format!(
                    "cannot pair {a} measures with {b} scenarios"
                )))
            }
        };
        Self::new(members)
    }

    pub fn members(&self) -> &[(RiskMeasureSpec<T>, ScenarioMeasure<T>)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of outcomes of the underlying space.
    pub fn outcomes(&self) -> usize {
        self.members[0].1.len()
    }

    pub fn specs(&self) -> impl Iterator<Item = &RiskMeasureSpec<T>> {
        self.members.iter().map(|(s, _)| s)
    }

    pub fn scenarios(&self) -> impl Iterator<Item = &ScenarioMeasure<T>> {
        self.members.iter().map(|(_, q)| q)
    }

    /// `R_X = (rho^i(X))_i`.
    pub fn profile(&self, x: &Position<T>) -> Result<RiskProfile<T>> {
        let entries = self
            .members
            .iter()
            .map(|(spec, q)| evaluate(spec, x, q).map(|v| v.value))
            .collect::<Result<Vec<_>>>()?;
        RiskProfile::new(entries)
    }

    pub fn map_scalar<U: Scalar>(&self) -> RiskFamily<U> {
        RiskFamily {
            members: self
                .members
                .iter()
                .map(|(s, q)| (s.map_scalar(), q.map_scalar()))
                .collect(),
        }
    }
}

/// The risk profile of `X` over the index set built by [`RiskFamily::broadcast`].
pub fn profile<T: Scalar>(
    specs: &[RiskMeasureSpec<T>],
    scenarios: &[ScenarioMeasure<T>],
    x: &Position<T>,
) -> Result<RiskProfile<T>> {
    RiskFamily::broadcast(specs, scenarios)?.profile(x)
}

/// If `F_{X,Q1} = F_{Y,Q2}` then the two risk values must agree. Returns
/// whether the implication held (vacuously true when the laws differ).
pub fn cross_law_invariance_check<T: Scalar>(
    spec: &RiskMeasureSpec<T>,
    x: &Position<T>,
    q1: &ScenarioMeasure<T>,
    y: &Position<T>,
    q2: &ScenarioMeasure<T>,
) -> Result<bool> {
    let fx = distribution(x, q1)?;
    let fy = distribution(y, q2)?;
    let tol = T::tol(1e-12);
    if !fx.approx_eq(&fy, &tol) {
        return Ok(true);
    }
    let a = evaluate_distribution(spec, &fx)?.value;
    let b = evaluate(spec, y, q2)?.value;
    Ok((a - b).abs() <= T::tol(1e-10))
}

/// Levels at which an ES spec would fall back to `ML` for this distribution.
pub fn first_atom_mass<T: Scalar>(x: &Position<T>, q: &ScenarioMeasure<T>) -> Result<T> {
    let dist = distribution(x, q)?;
    Ok(min_of(first_step(&dist), T::one()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, Rational};

    fn canonical() -> Position {
        Position::new(vec![-10.0, -5.0, 0.0, 5.0]).unwrap()
    }

    fn uniform() -> ScenarioMeasure {
        ScenarioMeasure::uniform(4).unwrap()
    }

    fn skewed() -> ScenarioMeasure {
        ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap()
    }

    fn value(spec: RiskMeasureSpec, x: &Position, q: &ScenarioMeasure) -> f64 {
        evaluate(&spec, x, q).unwrap().value
    }

    #[test]
    fn canonical_values() {
        let x = canonical();
        assert_eq!(value(RiskMeasureSpec::ExpectedShortfall(0.5), &x, &uniform()), 7.5);
        assert!((value(RiskMeasureSpec::ExpectedLoss, &x, &skewed()) - 5.0).abs() < 1e-12);
        assert_eq!(value(RiskMeasureSpec::ExpectedLoss, &x, &uniform()), 2.5);
        assert_eq!(value(RiskMeasureSpec::ValueAtRisk(0.25), &x, &uniform()), 10.0);
        assert_eq!(value(RiskMeasureSpec::MaxLoss, &x, &uniform()), 10.0);
    }

    #[test]
    fn es_at_one_is_expected_loss() {
        let x = canonical();
        for q in [uniform(), skewed()] {
            let es1 = value(RiskMeasureSpec::ExpectedShortfall(1.0), &x, &q);
            let el = value(RiskMeasureSpec::ExpectedLoss, &x, &q);
            assert!((es1 - el).abs() < 1e-12);
        }
    }

    #[test]
    fn es_at_zero_is_max_loss() {
        let v = evaluate(&RiskMeasureSpec::ExpectedShortfall(0.0), &canonical(), &uniform()).unwrap();
        assert_eq!(v.value, 10.0);
        assert!(v.tail_within_first_atom);
    }

    #[test]
    fn small_es_level_is_flagged() {
        let v = evaluate(&RiskMeasureSpec::ExpectedShortfall(0.1), &canonical(), &uniform()).unwrap();
        assert_eq!(v.value, 10.0);
        assert!(v.tail_within_first_atom);
        let v = evaluate(&RiskMeasureSpec::ExpectedShortfall(0.5), &canonical(), &uniform()).unwrap();
        assert!(!v.tail_within_first_atom);
    }

    #[test]
    fn flat_spectrum_matches_es() {
        let phi = Spectrum::new(vec![(0.0, 2.0), (0.5, 0.0)]).unwrap();
        assert_eq!(value(RiskMeasureSpec::Spectral(phi), &canonical(), &uniform()), 7.5);
    }

    #[test]
    fn skewed_es_uses_exact_steps() {
        let x = canonical().map_scalar::<Rational>();
        let q = ScenarioMeasure::new(vec![ratio(2, 5), ratio(3, 10), ratio(1, 5), ratio(1, 10)]).unwrap();
        let v = evaluate(&RiskMeasureSpec::ExpectedShortfall(ratio(1, 2)), &x, &q).unwrap();
        assert_eq!(v.value, ratio(9, 1));
    }

    #[test]
    fn normalization_for_every_kind() {
        let zero = Position::zeros(4);
        let specs = vec![
            RiskMeasureSpec::ExpectedLoss,
            RiskMeasureSpec::ValueAtRisk(0.3),
            RiskMeasureSpec::ExpectedShortfall(0.2),
            RiskMeasureSpec::MaxLoss,
            RiskMeasureSpec::Spectral(Spectrum::new(vec![(0.0, 1.5), (0.5, 0.5)]).unwrap()),
            RiskMeasureSpec::EsMixture(EsMixtureMeasure::new(vec![(0.3, 0.5), (0.9, 0.5)]).unwrap()),
        ];
        for spec in specs {
            assert_eq!(value(spec, &zero, &skewed()), 0.0);
        }
    }

    #[test]
    fn profiles() {
        let x = canonical();
        let p = profile(&[RiskMeasureSpec::ExpectedLoss], &[uniform(), skewed()], &x).unwrap();
        assert_eq!(p.entries()[0], 2.5);
        assert!((p.entries()[1] - 5.0).abs() < 1e-12);

        let specs = [
            RiskMeasureSpec::ExpectedLoss,
            RiskMeasureSpec::ExpectedShortfall(0.5),
            RiskMeasureSpec::ValueAtRisk(0.25),
        ];
        let p = profile(&specs, &[uniform()], &x).unwrap();
        assert_eq!(p.entries(), &[2.5, 7.5, 10.0]);

        let p = profile(&specs, &[uniform()], &Position::zeros(4)).unwrap();
        assert_eq!(p.entries(), &[0.0, 0.0, 0.0]);

        assert!(matches!(profile(&specs, &[], &x), Err(Error::Domain(_))));
        assert!(matches!(
            profile(&specs, &[uniform(), skewed()], &x),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn cross_law_invariance() {
        let x = canonical();
        let y = Position::new(vec![5.0, 0.0, -5.0, -10.0]).unwrap();
        let specs = vec![
            RiskMeasureSpec::ExpectedLoss,
            RiskMeasureSpec::ValueAtRisk(0.25),
            RiskMeasureSpec::ExpectedShortfall(0.5),
            RiskMeasureSpec::MaxLoss,
            RiskMeasureSpec::Spectral(Spectrum::new(vec![(0.0, 1.5), (0.5, 0.5)]).unwrap()),
        ];
        for spec in &specs {
            assert!(cross_law_invariance_check(spec, &x, &uniform(), &y, &uniform()).unwrap());
        }
        let a = Position::new(vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        let b = Position::new(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(cross_law_invariance_check(&specs[2], &a, &uniform(), &b, &uniform()).unwrap());

        let c = Position::new(vec![0.0, 1.0]).unwrap();
        let half = ScenarioMeasure::new(vec![0.5, 0.5]).unwrap();
        let tilted = ScenarioMeasure::new(vec![0.75, 0.25]).unwrap();
        assert!(cross_law_invariance_check(&specs[2], &c, &half, &c, &tilted).unwrap());
    }

    #[test]
    fn spec_wire_format() {
        let spec: RiskMeasureSpec = serde_json::from_str(r#"{"kind":"ES","alpha":0.5}"#).unwrap();
        assert_eq!(spec, RiskMeasureSpec::ExpectedShortfall(0.5));
        let spec: RiskMeasureSpec =
            serde_json::from_str(r#"{"kind":"Spectral","breakpoints":[[0.0,2.0],[0.5,0.0]]}"#).unwrap();
        assert_eq!(
            spec,
            RiskMeasureSpec::Spectral(Spectrum::expected_shortfall(0.5).unwrap())
        );
        assert_eq!(
            serde_json::to_string(&RiskMeasureSpec::ValueAtRisk(0.25)).unwrap(),
            r#"{"kind":"VaR","alpha":0.25}"#
        );
        assert!(serde_json::from_str::<RiskMeasureSpec>(r#"{"kind":"ES","alpha":1.5}"#).is_err());
        assert!(serde_json::from_str::<RiskMeasureSpec>(r#"{"kind":"Entropic"}"#).is_err());
    }

    #[test]
    fn shorthand() {
        assert_eq!("ES:0.5".parse::<RiskMeasureSpec>().unwrap(), RiskMeasureSpec::ExpectedShortfall(0.5));
        assert_eq!("el".parse::<RiskMeasureSpec>().unwrap(), RiskMeasureSpec::ExpectedLoss);
        assert!("VaR".parse::<RiskMeasureSpec>().is_err());
        assert!("ES:2".parse::<RiskMeasureSpec>().is_err());
    }
}
