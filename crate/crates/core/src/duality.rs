//! Dual sets, penalty functions and LP verification of the dual
//! representations `rho(X) = sup_{Q in D} E_Q[-X]`.
//!
//! Every coherent base measure has a polyhedral dual set on a finite space,
//! written here as linear rows over the scenario vector `q`:
//!
//! | measure  | dual set                                    |
//! |----------|---------------------------------------------|
//! | `EL`     | `{P}`                                       |
//! | `ES(a)`  | `q_k <= p_k / a`                            |
//! | `ML`     | every `Q << P`                              |
//! | spectral | `Q(S) <= Phi(P(S))` for every event `S`     |
//!
//! with `Phi(t) = int_0^t phi`. Composed measures get their dual set by
//! homogenizing the component rows over the weights `mu` of the combination's
//! own dual set.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::combinators::{combine, CombinationSpec, IndexWeight, RiskProfile};
use crate::error::{check_len, Error, Result};
use crate::kusuoka::{phi_from_m, Spectrum};
use crate::lp::{LinearProgram, LpOutcome, Relation};
use crate::measures::{RiskFamily, RiskMeasureSpec};
use crate::prob::{Position, ScenarioMeasure};
use crate::sampling;
use crate::scalar::{cmp, dot, min_of, Scalar};

const MEMBERSHIP_TOL: f64 = 1e-10;
/// Events are enumerated for spectral dual sets; beyond this support size
/// the LP form is refused.
const MAX_SPECTRAL_SUPPORT: usize = 16;

/// `alpha(Q)`: a nonnegative number or `+inf`.
#[derive(Debug, Clone, PartialEq)]
pub enum PenaltyValue<T: Scalar = f64> {
    Finite(T),
    Infinite,
}

impl<T: Scalar> PenaltyValue<T> {
    pub fn zero() -> Self {
        PenaltyValue::Finite(T::zero())
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, PenaltyValue::Finite(v) if v.is_zero())
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, PenaltyValue::Infinite)
    }

    fn indicator(member: bool) -> Self {
        if member {
            Self::zero()
        } else {
            PenaltyValue::Infinite
        }
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (PenaltyValue::Infinite, b) => b,
            (a, PenaltyValue::Infinite) => a,
            (PenaltyValue::Finite(a), PenaltyValue::Finite(b)) => PenaltyValue::Finite(min_of(a, b)),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            PenaltyValue::Finite(v) => v.to_f64(),
            PenaltyValue::Infinite => f64::INFINITY,
        }
    }
}

impl<T: Scalar> fmt::Display for PenaltyValue<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PenaltyValue::Finite(v) => write!(f, "{}", v.to_f64()),
            PenaltyValue::Infinite => f.write_str("+inf"),
        }
    }
}

/// Serialized as a number, or the string `"+inf"`.
impl<T: Scalar> Serialize for PenaltyValue<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PenaltyValue::Finite(v) => serializer.serialize_f64(v.to_f64()),
            PenaltyValue::Infinite => serializer.serialize_str("+inf"),
        }
    }
}

impl<'de> Deserialize<'de> for PenaltyValue<f64> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Wire {
            Number(f64),
            Text(String),
        }
        match Wire::deserialize(deserializer)? {
            Wire::Number(v) => Ok(PenaltyValue::Finite(v)),
            Wire::Text(s) if s == "+inf" => Ok(PenaltyValue::Infinite),
            Wire::Text(s) => Err(serde::de::Error::custom(format!("bad penalty `{s}`"))),
        }
    }
}

/// A linear row `coeffs . q (relation) rhs`.
pub type Row<T> = (Vec<T>, Relation, T);

/// The dual set of a coherent measure read under the base probability `base`.
#[derive(Debug, Clone, PartialEq)]
pub enum DualSet<T: Scalar = f64> {
    /// `{P}`.
    Singleton { base: ScenarioMeasure<T> },
    /// `{Q << P : dQ/dP <= cap}`.
    DensityBox { base: ScenarioMeasure<T>, cap: T },
    /// `{Q << P}`.
    Full { base: ScenarioMeasure<T> },
    /// `{Q : Q(S) <= Phi(P(S))}` for a nonincreasing spectrum.
    Capacity {
        base: ScenarioMeasure<T>,
        phi: Spectrum<T>,
    },
}

impl<T: Scalar> DualSet<T> {
    pub fn of(spec: &RiskMeasureSpec<T>, base: &ScenarioMeasure<T>) -> Result<Self> {
        spec.validate()?;
        let base = base.clone();
        match spec {
            RiskMeasureSpec::ExpectedLoss => Ok(DualSet::Singleton { base }),
            RiskMeasureSpec::ExpectedShortfall(alpha) if alpha.is_zero() => Ok(DualSet::Full { base }),
            RiskMeasureSpec::ExpectedShortfall(alpha) => Ok(DualSet::DensityBox {
                base,
                cap: T::one() / alpha.clone(),
            }),
            RiskMeasureSpec::MaxLoss => Ok(DualSet::Full { base }),
            RiskMeasureSpec::Spectral(phi) if phi.is_nonincreasing() => Ok(DualSet::Capacity {
                base,
                phi: phi.clone(),
            }),
            RiskMeasureSpec::EsMixture(m) => Ok(DualSet::Capacity {
                base,
                phi: phi_from_m(m),
            }),
            other => Err(Error::Unsupported(format!(
                "{} is not coherent; only coherent penalties are computed",
                other.label()
            ))),
        }
    }

    pub fn base(&self) -> &ScenarioMeasure<T> {
        match self {
            DualSet::Singleton { base }
            | DualSet::DensityBox { base, .. }
            | DualSet::Full { base }
            | DualSet::Capacity { base, .. } => base,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            DualSet::Singleton { .. } => "singleton",
            DualSet::DensityBox { .. } => "density-box",
            DualSet::Full { .. } => "full",
            DualSet::Capacity { .. } => "spectral-majorization",
        }
    }

    pub fn len(&self) -> usize {
        self.base().len()
    }

    pub fn is_empty(&self) -> bool {
        self.base().is_empty()
    }

    /// The concave distortion `Phi` with `sup_{Q in D} E_Q[-X] = int VaR dPhi`.
    pub fn distortion(&self, t: &T) -> T {
        match self {
            DualSet::Singleton { .. } => t.clone(),
            DualSet::DensityBox { cap, .. } => min_of(t.clone() * cap.clone(), T::one()),
            DualSet::Full { .. } => {
                if t.gt_zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            DualSet::Capacity { phi, .. } => phi.cumulative(t),
        }
    }

    pub fn contains(&self, q: &ScenarioMeasure<T>) -> Result<bool> {
        check_len(self.len(), q.len())?;
        let tol = T::tol(MEMBERSHIP_TOL);
        let p = self.base().probs();
        let qs = q.probs();
        if !q.is_absolutely_continuous(self.base()) {
            return Ok(false);
        }
        Ok(match self {
            DualSet::Singleton { .. } => p.iter().zip(qs).all(|(a, b)| (a.clone() - b.clone()).abs() <= tol),
            DualSet::DensityBox { cap, .. } => p
                .iter()
                .zip(qs)
                .filter(|(pk, _)| pk.gt_zero())
                .all(|(pk, qk)| qk.clone() / pk.clone() <= cap.clone() + tol.clone()),
            DualSet::Full { .. } => true,
            DualSet::Capacity { .. } => {
                // the prefixes by decreasing density are the vertices of the
                // upper envelope of {(P(S), Q(S))}; a concave Phi above them
                // dominates every event
                let mut support: Vec<usize> = (0..p.len()).filter(|&k| p[k].gt_zero()).collect();
                support.sort_by(|&a, &b| {
                    let da = qs[a].clone() / p[a].clone();
                    let db = qs[b].clone() / p[b].clone();
                    cmp(&db, &da).then(a.cmp(&b))
                });
                let (mut pt, mut qt) = (T::zero(), T::zero());
                support.iter().all(|&k| {
                    pt = pt.clone() + p[k].clone();
                    qt = qt.clone() + qs[k].clone();
                    qt <= self.distortion(&pt) + tol.clone()
                })
            }
        })
    }

    /// Linear rows over `q` describing the set, including `sum q = 1` and
    /// `q_k = 0` off the support of the base.
    pub fn rows(&self) -> Result<Vec<Row<T>>> {
        let n = self.len();
        let p = self.base().probs();
        let unit = |k: usize| {
            let mut v = vec![T::zero(); n];
            v[k] = T::one();
            v
        };
        let mut rows: Vec<Row<T>> = vec![(vec![T::one(); n], Relation::Eq, T::one())];
        for k in (0..n).filter(|&k| p[k].is_zero()) {
            rows.push((unit(k), Relation::Le, T::zero()));
        }
        let support: Vec<usize> = (0..n).filter(|&k| p[k].gt_zero()).collect();
        match self {
            DualSet::Singleton { .. } => {
                for &k in &support {
                    rows.push((unit(k), Relation::Eq, p[k].clone()));
                }
            }
            DualSet::DensityBox { cap, .. } => {
                for &k in &support {
                    rows.push((unit(k), Relation::Le, cap.clone() * p[k].clone()));
                }
            }
            DualSet::Full { .. } => {}
            DualSet::Capacity { .. } => {
                if support.len() > MAX_SPECTRAL_SUPPORT {
                    return Err(Error::Unsupported(format!(
                        "spectral dual set over {} outcomes (event enumeration is limited to {MAX_SPECTRAL_SUPPORT})",
                        support.len()
                    )));
                }
                let full = (1usize << support.len()) - 1;
                for mask in 1..full {
                    let mut coeffs = vec![T::zero(); n];
                    let mut mass = T::zero();
                    for (bit, &k) in support.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            coeffs[k] = T::one();
                            mass = mass + p[k].clone();
                        }
                    }
                    rows.push((coeffs, Relation::Le, self.distortion(&mass)));
                }
            }
        }
        Ok(rows)
    }

    /// The maximizer of `E_Q[-X]` built greedily: outcomes in increasing
    /// payoff order (ties by index) receive `Phi(P_{<=k}) - Phi(P_{<k})`.
    pub fn greedy_argmax(&self, x: &Position<T>) -> Result<ScenarioMeasure<T>> {
        check_len(self.len(), x.len())?;
        let p = self.base().probs();
        let mut order: Vec<usize> = (0..p.len()).collect();
        order.sort_by(|&a, &b| cmp(&x.values()[a], &x.values()[b]).then(a.cmp(&b)));
        let mut q = vec![T::zero(); p.len()];
        let mut below = T::zero();
        let mut phi_below = T::zero();
        for k in order {
            let upto = below.clone() + p[k].clone();
            let phi_upto = self.distortion(&upto);
            q[k] = phi_upto.clone() - phi_below;
            below = upto;
            phi_below = phi_upto;
        }
        ScenarioMeasure::new(q)
    }
}

/// `alpha^min(Q)` of a coherent spec read under `base`: 0 inside the dual
/// set, `+inf` outside.
pub fn min_penalty<T: Scalar>(
    spec: &RiskMeasureSpec<T>,
    base: &ScenarioMeasure<T>,
    q: &ScenarioMeasure<T>,
) -> Result<PenaltyValue<T>> {
    Ok(PenaltyValue::indicator(DualSet::of(spec, base)?.contains(q)?))
}

/// `sup_{Q in D} E_Q[-X]` with the maximizing `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation<T: Scalar = f64> {
    pub value: T,
    pub certificate: ScenarioMeasure<T>,
}

pub fn dual_evaluate<T: Scalar>(
    spec: &RiskMeasureSpec<T>,
    x: &Position<T>,
    base: &ScenarioMeasure<T>,
) -> Result<DualEvaluation<T>> {
    let certificate = DualSet::of(spec, base)?.greedy_argmax(x)?;
    let value = -certificate.expectation(x)?;
    Ok(DualEvaluation { value, certificate })
}

fn lp_optimum<T: Scalar>(lp: &LinearProgram<T>) -> Result<(T, Vec<T>)> {
    match lp.solve() {
        LpOutcome::Optimal { value, x } => Ok((value, x)),
        LpOutcome::Infeasible => Err(Error::Internal("dual LP infeasible".into())),
        LpOutcome::Unbounded => Err(Error::Internal("dual LP unbounded".into())),
    }
}

/// Rounds simplex output onto the simplex: tiny negative entries from float
/// pivots are clipped before validation.
fn to_measure<T: Scalar>(mut q: Vec<T>) -> Result<ScenarioMeasure<T>> {
    for v in q.iter_mut() {
        if v.lt_zero() {
            *v = T::zero();
        }
    }
    ScenarioMeasure::new(q)
}

/// The same supremum solved as an LP over the dual-set rows.
pub fn dual_evaluate_lp<T: Scalar>(
    spec: &RiskMeasureSpec<T>,
    x: &Position<T>,
    base: &ScenarioMeasure<T>,
) -> Result<DualEvaluation<T>> {
    let set = DualSet::of(spec, base)?;
    check_len(set.len(), x.len())?;
    let mut lp = LinearProgram::new(x.len());
    lp.maximize(x.values().iter().map(|v| -v.clone()).collect())?;
    for (coeffs, rel, rhs) in set.rows()? {
        lp.constrain(coeffs, rel, rhs)?;
    }
    let (value, q) = lp_optimum(&lp)?;
    Ok(DualEvaluation {
        value,
        certificate: to_measure(q)?,
    })
}

/// The set `V_f` of weights with `gamma_f = 0`, as a dual set on the index
/// set.
pub fn combination_dual_set<T: Scalar>(f: &CombinationSpec<T>, n: usize) -> Result<DualSet<T>> {
    f.validate()?;
    if let Some(len) = f.index_len() {
        check_len(len, n)?;
    }
    match f {
        CombinationSpec::WorstCase => Ok(DualSet::Full {
            base: ScenarioMeasure::uniform(n)?,
        }),
        CombinationSpec::Mixture(mu) => Ok(DualSet::Singleton {
            base: ScenarioMeasure::new(mu.weights().to_vec())?,
        }),
        CombinationSpec::UtilityOfProfile { pi, weights } => {
            DualSet::of(pi, &ScenarioMeasure::new(weights.weights().to_vec())?)
        }
    }
}

/// Closed-form `gamma_f(mu)` and a sampled lower bound
/// `sup_R { sum_i mu_i R_i - f(R) }`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaReport {
    pub combination: String,
    pub mu: Vec<f64>,
    pub closed_form: PenaltyValue<f64>,
    pub sampled_lower_bound: f64,
    pub samples: usize,
    /// `sampled_lower_bound <= closed_form`.
    pub consistent: bool,
}

pub fn gamma_f(
    f: &CombinationSpec,
    mu: &IndexWeight,
    samples: usize,
    seed: u64,
) -> Result<GammaReport> {
    let n = mu.len();
    let set = combination_dual_set(f, n)?;
    let closed_form = PenaltyValue::indicator(set.contains(&ScenarioMeasure::new(mu.weights().to_vec())?)?);

    let mut rng = sampling::rng(seed);
    let eval = |r: Vec<f64>| -> Result<f64> {
        let value = dot(mu.weights(), &r);
        Ok(value - combine(f, &RiskProfile::new(r)?)?)
    };
    let mut best = eval(vec![0.0; n])?;
    let mut count = 1;
    while count < samples {
        let scale = 10f64.powi(rng.gen_range(0..4));
        let r = if rng.gen_bool(0.2) {
            vec![sampling::value(&mut rng, scale); n]
        } else {
            sampling::vector(&mut rng, n, scale)
        };
        best = best.max(eval(r)?);
        count += 1;
    }
    let consistent = match closed_form {
        PenaltyValue::Finite(v) => best <= v + 1e-10,
        PenaltyValue::Infinite => true,
    };
    Ok(GammaReport {
        combination: f.label(),
        mu: mu.weights().to_vec(),
        closed_form,
        sampled_lower_bound: best,
        samples: count,
        consistent,
    })
}

/// Component dual sets of a family: member `i` is its spec read under its
/// own scenario.
pub fn component_dual_sets<T: Scalar>(family: &RiskFamily<T>) -> Result<Vec<DualSet<T>>> {
    family
        .members()
        .iter()
        .map(|(spec, q)| DualSet::of(spec, q))
        .collect()
}

/// `alpha_{rho^mu}(Q)` with the decomposition that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct MixturePenalty<T: Scalar = f64> {
    pub penalty: PenaltyValue<T>,
    /// `Q^i in D_i` with `sum_i mu_i Q^i = Q` when one exists.
    pub decomposition: Option<Vec<ScenarioMeasure<T>>>,
}

/// 0 iff `Q = sum_i mu_i Q^i` for some `Q^i` in the component dual sets.
/// Components with zero weight only need a member of their dual set.
pub fn mixture_penalty<T: Scalar>(
    family: &RiskFamily<T>,
    mu: &IndexWeight<T>,
    q: &ScenarioMeasure<T>,
) -> Result<MixturePenalty<T>> {
    check_len(family.len(), mu.len())?;
    check_len(family.outcomes(), q.len())?;
    let sets = component_dual_sets(family)?;
    let n = q.len();
    let m = sets.len();
    let mut lp = LinearProgram::new(m * n);
    for (i, set) in sets.iter().enumerate() {
        for (coeffs, rel, rhs) in set.rows()? {
            let terms: Vec<(usize, T)> = coeffs.into_iter().enumerate().map(|(k, c)| (i * n + k, c)).collect();
            lp.constrain_sparse(&terms, rel, rhs)?;
        }
    }
    for k in 0..n {
        let terms: Vec<(usize, T)> = (0..m).map(|i| (i * n + k, mu.weights()[i].clone())).collect();
        lp.constrain_sparse(&terms, Relation::Eq, q.probs()[k].clone())?;
    }
    Ok(match lp.solve() {
        LpOutcome::Optimal { x, .. } => {
            let decomposition = x
                .chunks(n)
                .map(|block| to_measure(block.to_vec()))
                .collect::<Result<Vec<_>>>()?;
            MixturePenalty {
                penalty: PenaltyValue::zero(),
                decomposition: Some(decomposition),
            }
        }
        LpOutcome::Infeasible => MixturePenalty {
            penalty: PenaltyValue::Infinite,
            decomposition: None,
        },
        LpOutcome::Unbounded => return Err(Error::Internal("feasibility LP unbounded".into())),
    })
}

/// The LP over the composed dual set: weights `mu in V_f` and unnormalized
/// component measures `y^i = mu_i Q^i` with `y^i in mu_i D_i`. Variables are
/// laid out as `[mu_1..mu_m, y^1, .., y^m]`.
struct ComposedLp<T: Scalar> {
    lp: LinearProgram<T>,
    m: usize,
    n: usize,
}

impl<T: Scalar> ComposedLp<T> {
    fn new(weight_set: Option<&DualSet<T>>, sets: &[DualSet<T>], n: usize) -> Result<Self> {
        let m = sets.len();
        let mut lp = LinearProgram::new(m + m * n);
        match weight_set {
            Some(v) => {
                for (coeffs, rel, rhs) in v.rows()? {
                    let terms: Vec<(usize, T)> = coeffs.into_iter().enumerate().collect();
                    lp.constrain_sparse(&terms, rel, rhs)?;
                }
            }
            None => {
                let terms: Vec<(usize, T)> = (0..m).map(|i| (i, T::one())).collect();
                lp.constrain_sparse(&terms, Relation::Eq, T::one())?;
            }
        }
        for (i, set) in sets.iter().enumerate() {
            for (coeffs, rel, rhs) in set.rows()? {
                let mut terms: Vec<(usize, T)> = coeffs
                    .into_iter()
                    .enumerate()
                    .map(|(k, c)| (m + i * n + k, c))
                    .collect();
                terms.push((i, -rhs));
                lp.constrain_sparse(&terms, rel, T::zero())?;
            }
        }
        Ok(Self { lp, m, n })
    }

    fn y(&self, i: usize, k: usize) -> usize {
        self.m + i * self.n + k
    }
}

/// One component's contribution at the optimum of the composed dual LP.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PenaltyTraceEntry {
    pub component: String,
    pub weight: f64,
    /// `Q^i` (empty when the weight is zero).
    pub scenario_q: Vec<f64>,
    /// `E_{Q^i}[-X]`.
    pub value: f64,
    pub penalty: PenaltyValue<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualCheckReport {
    pub combination: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub certificate_q: Vec<f64>,
    pub penalty_trace: Vec<PenaltyTraceEntry>,
    /// For the worst case: `max_i sup_{D_i} E_Q[-X]` over the vertices
    /// `delta_i`, solved greedily per component.
    pub vertex_rhs: Option<f64>,
    pub passed: bool,
}

/// Compares `rho(X) = f(rho_I(X))` with `max E_Q[-X]` over the composed
/// dual polytope.
pub fn composed_dual_check<T: Scalar>(
    f: &CombinationSpec<T>,
    family: &RiskFamily<T>,
    x: &Position<T>,
    tol: f64,
) -> Result<DualCheckReport> {
    let m = family.len();
    let n = family.outcomes();
    check_len(n, x.len())?;
    let weight_set = combination_dual_set(f, m)?;
    let sets = component_dual_sets(family)?;
    let lhs = combine(f, &family.profile(x)?)?;

    let mut composed = ComposedLp::new(Some(&weight_set), &sets, n)?;
    let mut objective = vec![T::zero(); m + m * n];
    for i in 0..m {
        for k in 0..n {
            objective[composed.y(i, k)] = -x.values()[k].clone();
        }
    }
    composed.lp.maximize(objective)?;
    let (rhs, sol) = lp_optimum(&composed.lp)?;

    let mut certificate = vec![T::zero(); n];
    let mut trace = Vec::with_capacity(m);
    for (i, (spec, _)) in family.members().iter().enumerate() {
        let weight = sol[i].clone();
        let y: Vec<T> = (0..n).map(|k| sol[composed.y(i, k)].clone()).collect();
        for (c, v) in certificate.iter_mut().zip(&y) {
            *c = c.clone() + v.clone();
        }
        let (scenario_q, value) = if weight.gt_zero() {
            let qi: Vec<T> = y.iter().map(|v| v.clone() / weight.clone()).collect();
            let value = -dot(&qi, x.values());
            (qi.iter().map(|v| v.to_f64()).collect(), value.to_f64())
        } else {
            (Vec::new(), 0.0)
        };
        trace.push(PenaltyTraceEntry {
            component: spec.label(),
            weight: weight.to_f64(),
            scenario_q,
            value,
            penalty: PenaltyValue::zero(),
        });
    }
    to_measure(certificate.clone())?;

    let vertex_rhs = match f {
        CombinationSpec::WorstCase => {
            let mut best: Option<T> = None;
            for set in &sets {
                let q = set.greedy_argmax(x)?;
                let v = -q.expectation(x)?;
                if best.as_ref().is_none_or(|b| v > *b) {
                    best = Some(v);
                }
            }
            best.map(|v| v.to_f64())
        }
        _ => None,
    };

    let gap = rhs.clone() - lhs.clone();
    let passed = gap.abs() <= T::tol(tol);
    Ok(DualCheckReport {
        combination: f.label(),
        lhs: lhs.to_f64(),
        rhs: rhs.to_f64(),
        gap: gap.to_f64(),
        certificate_q: certificate.iter().map(|v| v.to_f64()).collect(),
        penalty_trace: trace,
        vertex_rhs,
        passed,
    })
}

/// Worst-case penalty at `Q` computed three ways.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCasePenaltyReport {
    pub q: Vec<f64>,
    /// `inf_i alpha^min_{rho^i}(Q)` from the membership tests.
    pub membership_inf: PenaltyValue<f64>,
    /// `inf_i alpha_{rho^{delta_i}}(Q)` from the decomposition LP at each
    /// vertex weight.
    pub vertex_lp_inf: PenaltyValue<f64>,
    /// `inf_{mu} alpha_{rho^mu}(Q)` over the whole simplex, i.e. membership
    /// of `Q` in the convex hull of the component dual sets.
    pub hull_penalty: PenaltyValue<f64>,
    /// `membership_inf == vertex_lp_inf`.
    pub agree: bool,
}

pub fn worst_case_penalty_check<T: Scalar>(
    family: &RiskFamily<T>,
    q: &ScenarioMeasure<T>,
) -> Result<WorstCasePenaltyReport> {
    let m = family.len();
    let n = family.outcomes();
    check_len(n, q.len())?;
    let sets = component_dual_sets(family)?;

    let mut membership = PenaltyValue::<T>::Infinite;
    for set in &sets {
        membership = membership.min(PenaltyValue::indicator(set.contains(q)?));
    }
    let mut vertex = PenaltyValue::<T>::Infinite;
    for i in 0..m {
        vertex = vertex.min(mixture_penalty(family, &IndexWeight::dirac(m, i)?, q)?.penalty);
    }

    let mut hull = ComposedLp::new(None, &sets, n)?;
    for k in 0..n {
        let terms: Vec<(usize, T)> = (0..m).map(|i| (hull.y(i, k), T::one())).collect();
        hull.lp.constrain_sparse(&terms, Relation::Eq, q.probs()[k].clone())?;
    }
    let hull_penalty = PenaltyValue::<f64>::indicator(hull.lp.solve().is_feasible());

    let membership_inf = PenaltyValue::<f64>::indicator(membership.is_zero());
    let vertex_lp_inf = PenaltyValue::<f64>::indicator(vertex.is_zero());
    Ok(WorstCasePenaltyReport {
        q: q.probs().iter().map(|v| v.to_f64()).collect(),
        agree: membership_inf == vertex_lp_inf,
        membership_inf,
        vertex_lp_inf,
        hull_penalty,
    })
}
