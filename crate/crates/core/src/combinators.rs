//! Combination functions on risk profiles and the composed measures
//! `rho(X) = f(rho^1(X), ..., rho^n(X))`, with a falsification-based checker
//! for the axioms of both `f` and `rho`.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::measures::{evaluate, RiskFamily, RiskMeasureSpec};
use crate::prob::{validate_probability_vector, Position, ScenarioMeasure};
use crate::sampling::{self, SeededRng};
use crate::scalar::{dot, Scalar};

/// A probability vector `mu` over the finite index set.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexWeight<T: Scalar = f64> {
    weights: Vec<T>,
}

impl<T: Scalar> IndexWeight<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        validate_probability_vector(&weights, "index weight")?;
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::domain("the index set must be non-empty"));
        }
        Ok(Self {
            weights: vec![T::one() / T::from_usize(n); n],
        })
    }

    /// `delta_i` on an index set of size `n`.
    pub fn dirac(n: usize, i: usize) -> Result<Self> {
        if i >= n {
            return Err(Error::domain(format!("index {i} out of range 0..{n}")));
        }
        let mut weights = vec![T::zero(); n];
        weights[i] = T::one();
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn map_scalar<U: Scalar>(&self) -> IndexWeight<U> {
        IndexWeight {
            weights: self.weights.iter().map(|w| U::from_f64(w.to_f64())).collect(),
        }
    }
}

impl Serialize for IndexWeight<f64> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.weights.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IndexWeight<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let weights = Vec::<f64>::deserialize(deserializer)?;
        IndexWeight::new(weights).map_err(serde::de::Error::custom)
    }
}

/// `R = (R_i)_{i in I}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskProfile<T: Scalar = f64> {
    entries: Vec<T>,
}

impl<T: Scalar> RiskProfile<T> {
    pub fn new(entries: Vec<T>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("empty risk profile"));
        }
        if let Some(k) = entries.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::invalid("risk profile", format!("entry {k} is not finite")));
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_entry(&self) -> T {
        self.entries
            .iter()
            .cloned()
            .fold(self.entries[0].clone(), crate::scalar::max_of)
    }
}

/// The aggregation `f` applied to a profile.
#[derive(Debug, Clone, PartialEq)]
pub enum CombinationSpec<T: Scalar = f64> {
    /// `max_i R_i`.
    WorstCase,
    /// `sum_i mu_i R_i`.
    Mixture(IndexWeight<T>),
    /// `pi(-R)` with `pi` one of `EL`, `VaR`, `ES`, `ML` read on `(I, mu)`.
    UtilityOfProfile {
        pi: RiskMeasureSpec<T>,
        weights: IndexWeight<T>,
    },
}

/// Which properties a combination has by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombinationProperties {
    pub monotone: bool,
    pub translation_invariant: bool,
    pub positively_homogeneous: bool,
    pub convex: bool,
    pub additive: bool,
    pub fatou: bool,
    pub bounded: bool,
}

impl<T: Scalar> CombinationSpec<T> {
    pub fn validate(&self) -> Result<()> {
        match self {
            CombinationSpec::UtilityOfProfile { pi, .. } => match pi {
                RiskMeasureSpec::ExpectedLoss
                | RiskMeasureSpec::ValueAtRisk(_)
                | RiskMeasureSpec::ExpectedShortfall(_)
                | RiskMeasureSpec::MaxLoss => pi.validate(),
                other => Err(Error::Unsupported(format!(
                    "utility of profile with {}; only EL, VaR, ES and ML are available",
                    other.label()
                ))),
            },
            _ => Ok(()),
        }
    }

    /// Size of the index set the spec is tied to, if any.
    pub fn index_len(&self) -> Option<usize> {
        match self {
            CombinationSpec::WorstCase => None,
            CombinationSpec::Mixture(mu) => Some(mu.len()),
            CombinationSpec::UtilityOfProfile { weights, .. } => Some(weights.len()),
        }
    }

    pub fn properties(&self) -> CombinationProperties {
        let all = CombinationProperties {
            monotone: true,
            translation_invariant: true,
            positively_homogeneous: true,
            convex: true,
            additive: true,
            fatou: true,
            bounded: true,
        };
        match self {
            CombinationSpec::WorstCase => CombinationProperties {
                additive: false,
                ..all
            },
            CombinationSpec::Mixture(_) => all,
            CombinationSpec::UtilityOfProfile { pi, .. } => CombinationProperties {
                convex: pi.is_convex(),
                additive: matches!(pi, RiskMeasureSpec::ExpectedLoss),
                ..all
            },
        }
    }

    pub fn label(&self) -> String {
        let w = |mu: &IndexWeight<T>| {
            mu.weights()
                .iter()
                .map(|v| v.to_f64().to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        match self {
            CombinationSpec::WorstCase => "WorstCase".into(),
            CombinationSpec::Mixture(mu) => format!("Mixture({})", w(mu)),
            CombinationSpec::UtilityOfProfile { pi, weights } => {
                format!("UtilityOfProfile({};{})", pi.label(), w(weights))
            }
        }
    }

    pub fn map_scalar<U: Scalar>(&self) -> CombinationSpec<U> {
        match self {
            CombinationSpec::WorstCase => CombinationSpec::WorstCase,
            CombinationSpec::Mixture(mu) => CombinationSpec::Mixture(mu.map_scalar()),
            CombinationSpec::UtilityOfProfile { pi, weights } => CombinationSpec::UtilityOfProfile {
                pi: pi.map_scalar(),
                weights: weights.map_scalar(),
            },
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", deny_unknown_fields)]
enum CombinationDoc {
    WorstCase,
    Mixture {
        weights: IndexWeight<f64>,
    },
    UtilityOfProfile {
        pi: RiskMeasureSpec<f64>,
        weights: IndexWeight<f64>,
    },
}

impl Serialize for CombinationSpec<f64> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match self.clone() {
            CombinationSpec::WorstCase => CombinationDoc::WorstCase,
            CombinationSpec::Mixture(weights) => CombinationDoc::Mixture { weights },
            CombinationSpec::UtilityOfProfile { pi, weights } => {
                CombinationDoc::UtilityOfProfile { pi, weights }
            }
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CombinationSpec<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let spec = match CombinationDoc::deserialize(deserializer)? {
            CombinationDoc::WorstCase => CombinationSpec::WorstCase,
            CombinationDoc::Mixture { weights } => CombinationSpec::Mixture(weights),
            CombinationDoc::UtilityOfProfile { pi, weights } => {
                CombinationSpec::UtilityOfProfile { pi, weights }
            }
        };
        spec.validate().map_err(serde::de::Error::custom)?;
        Ok(spec)
    }
}

/// `f(R)`.
pub fn combine<T: Scalar>(f: &CombinationSpec<T>, r: &RiskProfile<T>) -> Result<T> {
    f.validate()?;
    match f {
        CombinationSpec::WorstCase => Ok(r.max_entry()),
        CombinationSpec::Mixture(mu) => {
            check_len(mu.len(), r.len())?;
            Ok(dot(mu.weights(), r.entries()))
        }
        CombinationSpec::UtilityOfProfile { pi, weights } => {
            check_len(weights.len(), r.len())?;
            let negated = Position::new(r.entries().iter().map(|v| -v.clone()).collect())?;
            let aux = ScenarioMeasure::new(weights.weights().to_vec())?;
            Ok(evaluate(pi, &negated, &aux)?.value)
        }
    }
}

/// `rho = f(rho_I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedMeasure<T: Scalar = f64> {
    f: CombinationSpec<T>,
    family: RiskFamily<T>,
}

impl<T: Scalar> ComposedMeasure<T> {
    pub fn new(f: CombinationSpec<T>, family: RiskFamily<T>) -> Result<Self> {
        f.validate()?;
        if let Some(n) = f.index_len() {
            check_len(n, family.len())?;
        }
        Ok(Self { f, family })
    }

    pub fn combination(&self) -> &CombinationSpec<T> {
        &self.f
    }

    pub fn family(&self) -> &RiskFamily<T> {
        &self.family
    }

    pub fn outcomes(&self) -> usize {
        self.family.outcomes()
    }

    pub fn evaluate(&self, x: &Position<T>) -> Result<T> {
        combine(&self.f, &self.family.profile(x)?)
    }

    pub fn label(&self) -> String {
        let members: Vec<String> = self.family.specs().map(|s| s.label()).collect();
        format!("{} of [{}]", self.f.label(), members.join(", "))
    }
}

impl ComposedMeasure<f64> {
    /// Evaluates a raw payoff vector; panics only on dimension mismatch,
    /// which the checkers below rule out by construction.
    fn at(&self, values: &[f64]) -> f64 {
        let x = Position::new(values.to_vec()).expect("sampled positions are finite");
        self.evaluate(&x).expect("sampled positions match the space")
    }
}

/// `combine(f, profile(specs, scenarios, X))`.
pub fn compose<T: Scalar>(
    f: &CombinationSpec<T>,
    specs: &[RiskMeasureSpec<T>],
    scenarios: &[ScenarioMeasure<T>],
    x: &Position<T>,
) -> Result<T> {
    ComposedMeasure::new(f.clone(), RiskFamily::broadcast(specs, scenarios)?)?.evaluate(x)
}

/// Properties of a combination function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FAxiom {
    Monotonicity,
    TranslationInvariance,
    PositiveHomogeneity,
    Convexity,
    Additivity,
    /// One-sided: `f(R) <= max_i R_i`.
    Boundedness,
}

impl FAxiom {
    pub const ALL: [FAxiom; 6] = [
        FAxiom::Monotonicity,
        FAxiom::TranslationInvariance,
        FAxiom::PositiveHomogeneity,
        FAxiom::Convexity,
        FAxiom::Additivity,
        FAxiom::Boundedness,
    ];

    fn claimed_by(self, p: &CombinationProperties) -> bool {
        match self {
            FAxiom::Monotonicity => p.monotone,
            FAxiom::TranslationInvariance => p.translation_invariant,
            FAxiom::PositiveHomogeneity => p.positively_homogeneous,
            FAxiom::Convexity => p.convex,
            FAxiom::Additivity => p.additive,
            FAxiom::Boundedness => p.bounded,
        }
    }
}

/// Properties of a composed risk measure, one per inheritance rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RhoAxiom {
    Monotonicity,
    TranslationInvariance,
    Convexity,
    PositiveHomogeneity,
    /// Invariance under outcome permutations that preserve every scenario.
    LawInvariance,
    ComonotonicAdditivity,
    /// Checked along finite sequences `X + 2^-n Z`.
    FatouContinuity,
}

impl RhoAxiom {
    pub const ALL: [RhoAxiom; 7] = [
        RhoAxiom::Monotonicity,
        RhoAxiom::TranslationInvariance,
        RhoAxiom::Convexity,
        RhoAxiom::PositiveHomogeneity,
        RhoAxiom::LawInvariance,
        RhoAxiom::ComonotonicAdditivity,
        RhoAxiom::FatouContinuity,
    ];

    /// Whether the inheritance rule's hypotheses hold for `rho = f(rho_I)`.
    pub fn inherited(self, rho: &ComposedMeasure) -> bool {
        let p = rho.combination().properties();
        match self {
            RhoAxiom::Monotonicity => p.monotone,
            RhoAxiom::TranslationInvariance => p.translation_invariant,
            RhoAxiom::Convexity => p.convex && p.monotone && rho.family().specs().all(|s| s.is_convex()),
            RhoAxiom::PositiveHomogeneity => p.positively_homogeneous,
            RhoAxiom::LawInvariance => true,
            RhoAxiom::ComonotonicAdditivity => p.additive,
            RhoAxiom::FatouContinuity => p.fatou && p.monotone,
        }
    }
}

/// Inputs that reproduce a violation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub vectors: BTreeMap<String, Vec<f64>>,
    pub scalars: BTreeMap<String, f64>,
    /// The two sides of the violated relation.
    pub lhs: f64,
    pub rhs: f64,
    pub relation: String,
}

impl Witness {
    fn new(relation: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            vectors: BTreeMap::new(),
            scalars: BTreeMap::new(),
            lhs,
            rhs,
            relation: relation.into(),
        }
    }

    fn vector(mut self, name: &str, v: &[f64]) -> Self {
        self.vectors.insert(name.into(), v.to_vec());
        self
    }

    fn scalar(mut self, name: &str, v: f64) -> Self {
        self.scalars.insert(name.into(), v);
        self
    }
}

/// Result of a falsification run. `passed` means no counterexample was
/// found, never that the property is proved.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub subject: String,
    pub axiom: String,
    /// Whether the property is expected to hold by construction.
    pub expected: bool,
    pub trials: usize,
    pub passed: bool,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: u64,
    /// Absolute slack, scaled by the magnitude of the compared values.
    pub tol: f64,
    /// Payoffs are drawn from `[-scale, scale]`.
    pub scale: f64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self {
            trials: 10_000,
            seed: 0,
            tol: 1e-9,
            scale: 20.0,
        }
    }
}

fn slack(tol: f64, values: &[f64]) -> f64 {
    tol * (1.0 + values.iter().fold(0.0_f64, |m, v| m.max(v.abs())))
}

fn axpy(a: f64, x: &[f64], b: f64, y: &[f64]) -> Vec<f64> {
    x.iter().zip(y).map(|(u, v)| a * u + b * v).collect()
}

fn unit(n: usize, k: usize, c: f64) -> Vec<f64> {
    let mut v = vec![0.0; n];
    v[k] = c;
    v
}

/// Adversarial pairs tried before the random ones: scaled indicators on
/// distinct coordinates, which separate sup-type aggregations and break
/// quantile convexity.
fn curated_pairs(n: usize) -> Vec<(Vec<f64>, Vec<f64>)> {
    let mut pairs = vec![(vec![0.0; n], vec![0.0; n])];
    for c in [1.0, -10.0] {
        for k in 0..n {
            for l in 0..n {
                if k != l {
                    pairs.push((unit(n, k, c), unit(n, l, c)));
                }
            }
        }
    }
    pairs
}

type Trial<'a> = dyn FnMut(&[f64], &[f64], &mut SeededRng) -> Option<Witness> + 'a;

fn falsify(n: usize, config: &CheckConfig, trial: &mut Trial<'_>) -> (usize, Option<Witness>) {
    let mut rng = sampling::rng(config.seed);
    let mut count = 0;
    for (a, b) in curated_pairs(n) {
        count += 1;
        if let Some(w) = trial(&a, &b, &mut rng) {
            return (count, Some(w));
        }
    }
    while count < config.trials {
        count += 1;
        let a = sampling::vector(&mut rng, n, config.scale);
        let b = sampling::vector(&mut rng, n, config.scale);
        if let Some(w) = trial(&a, &b, &mut rng) {
            return (count, Some(w));
        }
    }
    (count, None)
}

/// Searches for a violation of `axiom` by `f` on profiles of length `n`.
pub fn check_f_axiom(
    f: &CombinationSpec,
    n: usize,
    axiom: FAxiom,
    config: &CheckConfig,
) -> Result<AxiomReport> {
    f.validate()?;
    if let Some(len) = f.index_len() {
        check_len(len, n)?;
    }
    if n == 0 {
        return Err(Error::domain("the index set must be non-empty"));
    }
    let eval = |r: &[f64]| -> f64 {
        combine(f, &RiskProfile::new(r.to_vec()).expect("finite profile")).expect("valid combination")
    };
    let tol = config.tol;
    let mut trial = |r: &[f64], s: &[f64], rng: &mut SeededRng| -> Option<Witness> {
        match axiom {
            FAxiom::Monotonicity => {
                let lower: Vec<f64> = r
                    .iter()
                    .zip(s)
                    .map(|(a, b)| a - b.abs() * rng.gen_range(0.0..=1.0))
                    .collect();
                let (hi, lo) = (eval(r), eval(&lower));
                (hi < lo - slack(tol, &[hi, lo])).then(|| {
                    Witness::new("f(R) >= f(S) for R >= S", hi, lo)
                        .vector("R", r)
                        .vector("S", &lower)
                })
            }
            FAxiom::TranslationInvariance => {
                let c = sampling::value(rng, config.scale);
                let shifted: Vec<f64> = r.iter().map(|v| v + c).collect();
                let (lhs, rhs) = (eval(&shifted), eval(r) + c);
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("f(R + c) = f(R) + c", lhs, rhs)
                        .vector("R", r)
                        .scalar("c", c)
                })
            }
            FAxiom::PositiveHomogeneity => {
                let lambda = 5.0 * sampling::unit_interval(rng);
                let scaled: Vec<f64> = r.iter().map(|v| v * lambda).collect();
                let (lhs, rhs) = (eval(&scaled), lambda * eval(r));
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("f(lambda R) = lambda f(R)", lhs, rhs)
                        .vector("R", r)
                        .scalar("lambda", lambda)
                })
            }
            FAxiom::Convexity => {
                let lambda = sampling::unit_interval(rng);
                let mixed = axpy(lambda, r, 1.0 - lambda, s);
                let (lhs, rhs) = (eval(&mixed), lambda * eval(r) + (1.0 - lambda) * eval(s));
                (lhs > rhs + slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("f(lambda R + (1 - lambda) S) <= lambda f(R) + (1 - lambda) f(S)", lhs, rhs)
                        .vector("R", r)
                        .vector("S", s)
                        .scalar("lambda", lambda)
                })
            }
            FAxiom::Additivity => {
                let total = axpy(1.0, r, 1.0, s);
                let (lhs, rhs) = (eval(&total), eval(r) + eval(s));
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("f(R + S) = f(R) + f(S)", lhs, rhs)
                        .vector("R", r)
                        .vector("S", s)
                })
            }
            FAxiom::Boundedness => {
                let bound = r.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lhs = eval(r);
                (lhs > bound + slack(tol, &[lhs, bound]))
                    .then(|| Witness::new("f(R) <= max_i R_i", lhs, bound).vector("R", r))
            }
        }
    };
    let (trials, witness) = falsify(n, config, &mut trial);
    Ok(AxiomReport {
        subject: f.label(),
        axiom: format!("{axiom:?}"),
        expected: axiom.claimed_by(&f.properties()),
        trials,
        passed: witness.is_none(),
        witness,
    })
}

/// Permutations of the outcomes that leave the probabilities of every
/// scenario unchanged: outcomes are shuffled only within groups whose
/// probability columns coincide.
fn symmetry_classes(rho: &ComposedMeasure) -> Vec<Vec<usize>> {
    let n = rho.outcomes();
    let columns: Vec<Vec<f64>> = (0..n)
        .map(|k| rho.family().scenarios().map(|q| q.probs()[k]).collect())
        .collect();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for k in 0..n {
        match classes.iter_mut().find(|c| columns[c[0]] == columns[k]) {
            Some(c) => c.push(k),
            None => classes.push(vec![k]),
        }
    }
    classes
}

/// Searches for a violation of `axiom` by the composed measure `rho`.
pub fn check_rho_axiom(rho: &ComposedMeasure, axiom: RhoAxiom, config: &CheckConfig) -> AxiomReport {
    let n = rho.outcomes();
    let tol = config.tol;
    let classes = symmetry_classes(rho);
    let mut trial = |x: &[f64], y: &[f64], rng: &mut SeededRng| -> Option<Witness> {
        match axiom {
            RhoAxiom::Monotonicity => {
                let lower: Vec<f64> = x
                    .iter()
                    .zip(y)
                    .map(|(a, b)| a - b.abs() * rng.gen_range(0.0..=1.0))
                    .collect();
                let (hi, lo) = (rho.at(x), rho.at(&lower));
                (hi > lo + slack(tol, &[hi, lo])).then(|| {
                    Witness::new("rho(X) <= rho(Y) for X >= Y", hi, lo)
                        .vector("X", x)
                        .vector("Y", &lower)
                })
            }
            RhoAxiom::TranslationInvariance => {
                let c = sampling::value(rng, config.scale);
                let shifted: Vec<f64> = x.iter().map(|v| v + c).collect();
                let (lhs, rhs) = (rho.at(&shifted), rho.at(x) - c);
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("rho(X + c) = rho(X) - c", lhs, rhs)
                        .vector("X", x)
                        .scalar("c", c)
                })
            }
            RhoAxiom::Convexity => {
                let lambda = if x.iter().chain(y).all(|v| v.fract() == 0.0) && rng.gen_bool(0.5) {
                    0.5
                } else {
                    sampling::unit_interval(rng)
                };
                let mixed = axpy(lambda, x, 1.0 - lambda, y);
                let (lhs, rhs) = (rho.at(&mixed), lambda * rho.at(x) + (1.0 - lambda) * rho.at(y));
                (lhs > rhs + slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new(
                        "rho(lambda X + (1 - lambda) Y) <= lambda rho(X) + (1 - lambda) rho(Y)",
                        lhs,
                        rhs,
                    )
                    .vector("X", x)
                    .vector("Y", y)
                    .scalar("lambda", lambda)
                })
            }
            RhoAxiom::PositiveHomogeneity => {
                let lambda = 5.0 * sampling::unit_interval(rng);
                let scaled: Vec<f64> = x.iter().map(|v| v * lambda).collect();
                let (lhs, rhs) = (rho.at(&scaled), lambda * rho.at(x));
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("rho(lambda X) = lambda rho(X)", lhs, rhs)
                        .vector("X", x)
                        .scalar("lambda", lambda)
                })
            }
            RhoAxiom::LawInvariance => {
                let mut perm: Vec<usize> = (0..n).collect();
                for class in &classes {
                    let shuffled: Vec<usize> = sampling::permutation(rng, class.len())
                        .into_iter()
                        .map(|j| class[j])
                        .collect();
                    for (slot, src) in class.iter().zip(shuffled) {
                        perm[*slot] = src;
                    }
                }
                let moved: Vec<f64> = perm.iter().map(|&j| x[j]).collect();
                let (lhs, rhs) = (rho.at(x), rho.at(&moved));
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("rho(X) = rho(Y) for equally distributed X, Y", lhs, rhs)
                        .vector("X", x)
                        .vector("Y", &moved)
                })
            }
            RhoAxiom::ComonotonicAdditivity => {
                let (a, b) = sampling::comonotone_pair(rng, n, config.scale);
                let total = axpy(1.0, &a, 1.0, &b);
                let (lhs, rhs) = (rho.at(&total), rho.at(&a) + rho.at(&b));
                ((lhs - rhs).abs() > slack(tol, &[lhs, rhs])).then(|| {
                    Witness::new("rho(X + Y) = rho(X) + rho(Y) for comonotone X, Y", lhs, rhs)
                        .vector("X", &a)
                        .vector("Y", &b)
                })
            }
            RhoAxiom::FatouContinuity => {
                let limit = rho.at(x);
                let tail = (40..=55)
                    .map(|k| {
                        let step = 0.5_f64.powi(k);
                        rho.at(&axpy(1.0, x, step, y))
                    })
                    .fold(f64::INFINITY, f64::min);
                (limit > tail + slack(tol, &[limit, tail])).then(|| {
                    Witness::new("rho(X) <= liminf rho(X + 2^-n Z)", limit, tail)
                        .vector("X", x)
                        .vector("Z", y)
                })
            }
        }
    };
    let (trials, witness) = falsify(n, config, &mut trial);
    AxiomReport {
        subject: rho.label(),
        axiom: format!("{axiom:?}"),
        expected: axiom.inherited(rho),
        trials,
        passed: witness.is_none(),
        witness,
    }
}

/// Outcome of [`lipschitz_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub subject: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest `|rho(X) - rho(Y)| / ||X - Y||_inf` seen (0 for `X = Y`).
    pub max_ratio: f64,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// Samples pairs and counts violations of `|rho(X) - rho(Y)| <= ||X - Y||_inf`.
pub fn lipschitz_check(rho: &ComposedMeasure, config: &CheckConfig) -> LipschitzReport {
    let n = rho.outcomes();
    let mut rng = sampling::rng(config.seed);
    let mut violations = 0;
    let mut max_ratio: f64 = 0.0;
    let mut witness = None;
    let mut pairs = curated_pairs(n);
    while pairs.len() < config.trials {
        let x = sampling::vector(&mut rng, n, config.scale);
        let y = if rng.gen_bool(0.3) {
            let eps = 10f64.powi(-rng.gen_range(1..8));
            x.iter().map(|v| v + eps * sampling::value(&mut rng, 1.0)).collect()
        } else {
            sampling::vector(&mut rng, n, config.scale)
        };
        pairs.push((x, y));
    }
    for (x, y) in &pairs {
        let dist = x.iter().zip(y).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()));
        let diff = (rho.at(x) - rho.at(y)).abs();
        if dist > 0.0 {
            max_ratio = max_ratio.max(diff / dist);
        }
        if diff > dist + slack(config.tol, &[diff, dist]) {
            violations += 1;
            witness.get_or_insert_with(|| {
                Witness::new("|rho(X) - rho(Y)| <= ||X - Y||_inf", diff, dist)
                    .vector("X", x)
                    .vector("Y", y)
            });
        }
    }
    LipschitzReport {
        subject: rho.label(),
        trials: pairs.len(),
        violations,
        max_ratio,
        passed: violations == 0,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kusuoka::Spectrum;

    fn profile(v: &[f64]) -> RiskProfile {
        RiskProfile::new(v.to_vec()).unwrap()
    }

    fn uniform() -> ScenarioMeasure {
        ScenarioMeasure::uniform(4).unwrap()
    }

    fn canonical() -> Position {
        Position::new(vec![-10.0, -5.0, 0.0, 5.0]).unwrap()
    }

    fn quick() -> CheckConfig {
        CheckConfig {
            trials: 2_000,
            seed: 11,
            ..CheckConfig::default()
        }
    }

    #[test]
    fn combine_examples() {
        assert_eq!(combine(&CombinationSpec::WorstCase, &profile(&[2.5, 7.5, 10.0])).unwrap(), 10.0);
        let mix = CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5]).unwrap());
        assert_eq!(combine(&mix, &profile(&[2.5, 7.5])).unwrap(), 5.0);
        let ut = CombinationSpec::UtilityOfProfile {
            pi: RiskMeasureSpec::MaxLoss,
            weights: IndexWeight::uniform(3).unwrap(),
        };
        assert_eq!(combine(&ut, &profile(&[2.5, 7.5, 10.0])).unwrap(), 10.0);
        assert!(RiskProfile::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn utility_closed_forms() {
        let mu = IndexWeight::new(vec![0.5, 0.25, 0.25]).unwrap();
        let r = profile(&[1.0, 4.0, 2.0]);
        let ut = |pi| CombinationSpec::UtilityOfProfile {
            pi,
            weights: mu.clone(),
        };
        let el = combine(&ut(RiskMeasureSpec::ExpectedLoss), &r).unwrap();
        assert_eq!(el, combine(&CombinationSpec::Mixture(mu.clone()), &r).unwrap());
        // upper tail of R under mu: 4 w.p. .25, 2 w.p. .25, 1 w.p. .5
        assert_eq!(combine(&ut(RiskMeasureSpec::ValueAtRisk(0.25)), &r).unwrap(), 4.0);
        assert_eq!(combine(&ut(RiskMeasureSpec::ValueAtRisk(0.3)), &r).unwrap(), 2.0);
        assert_eq!(combine(&ut(RiskMeasureSpec::ExpectedShortfall(0.5)), &r).unwrap(), 3.0);
        let bad = CombinationSpec::UtilityOfProfile {
            pi: RiskMeasureSpec::Spectral(Spectrum::expected_shortfall(0.5).unwrap()),
            weights: mu,
        };
        assert!(matches!(combine(&bad, &r), Err(Error::Unsupported(_))));
    }

    #[test]
    fn point_mass_mixture_recovers_component() {
        let r = profile(&[3.0, -1.0, 7.0]);
        for i in 0..3 {
            let f = CombinationSpec::Mixture(IndexWeight::dirac(3, i).unwrap());
            assert_eq!(combine(&f, &r).unwrap(), r.entries()[i]);
        }
    }

    #[test]
    fn compose_examples() {
        let x = canonical();
        let specs = [
            RiskMeasureSpec::ExpectedLoss,
            RiskMeasureSpec::ExpectedShortfall(0.5),
            RiskMeasureSpec::ValueAtRisk(0.25),
        ];
        assert_eq!(compose(&CombinationSpec::WorstCase, &specs, &[uniform()], &x).unwrap(), 10.0);
        let mix = CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5]).unwrap());
        let es = [RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::ExpectedShortfall(0.25)];
        assert_eq!(compose(&mix, &es, &[uniform()], &x).unwrap(), 8.75);
        for f in [CombinationSpec::WorstCase, mix] {
            assert_eq!(compose(&f, &es, &[uniform()], &Position::zeros(4)).unwrap(), 0.0);
        }
    }

    #[test]
    fn wire_format() {
        let f: CombinationSpec = serde_json::from_str(r#"{"kind":"Mixture","weights":[0.5,0.5]}"#).unwrap();
        assert_eq!(f, CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5]).unwrap()));
        let f: CombinationSpec = serde_json::from_str(
            r#"{"kind":"UtilityOfProfile","pi":{"kind":"ES","alpha":0.5},"weights":[0.25,0.75]}"#,
        )
        .unwrap();
        assert!(matches!(f, CombinationSpec::UtilityOfProfile { .. }));
        assert_eq!(
            serde_json::to_string(&CombinationSpec::WorstCase).unwrap(),
            r#"{"kind":"WorstCase"}"#
        );
        assert!(serde_json::from_str::<CombinationSpec>(r#"{"kind":"Mixture","weights":[0.5,0.6]}"#).is_err());
    }

    #[test]
    fn worst_case_is_not_additive() {
        let report = check_f_axiom(&CombinationSpec::WorstCase, 2, FAxiom::Additivity, &quick()).unwrap();
        assert!(!report.passed);
        assert!(!report.expected);
        assert!(report.witness.is_some());
    }

    #[test]
    fn mixture_satisfies_every_axiom() {
        let f = CombinationSpec::Mixture(IndexWeight::new(vec![0.3, 0.7]).unwrap());
        for axiom in FAxiom::ALL {
            let report = check_f_axiom(&f, 2, axiom, &quick()).unwrap();
            assert!(report.passed, "{axiom:?}: {:?}", report.witness);
        }
    }

    #[test]
    fn var_worst_case_is_not_convex() {
        let family = RiskFamily::broadcast(&[RiskMeasureSpec::ValueAtRisk(0.3)], &[uniform()]).unwrap();
        let rho = ComposedMeasure::new(CombinationSpec::WorstCase, family).unwrap();
        let report = check_rho_axiom(&rho, RhoAxiom::Convexity, &quick());
        assert!(!report.passed);
        assert!(!report.expected);
    }

    #[test]
    fn lipschitz_for_expected_loss_and_shortfall() {
        let family = RiskFamily::broadcast(
            &[RiskMeasureSpec::ExpectedLoss, RiskMeasureSpec::ExpectedShortfall(0.5)],
            &[uniform()],
        )
        .unwrap();
        let rho = ComposedMeasure::new(CombinationSpec::WorstCase, family).unwrap();
        let report = lipschitz_check(&rho, &quick());
        assert!(report.passed);
        assert!(report.max_ratio <= 1.0 + 1e-9);
    }
}
