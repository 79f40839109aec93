//! The acceptance suite: ten criteria, each a set of counted sub-checks with
//! the first failing instance kept as a witness.

use std::collections::BTreeMap;

use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::combinators::{
    check_rho_axiom, lipschitz_check, CheckConfig, CombinationSpec, ComposedMeasure, IndexWeight, RhoAxiom,
};
use crate::duality::{composed_dual_check, dual_evaluate, dual_evaluate_lp, mixture_penalty, worst_case_penalty_check};
use crate::elicit::{elicit, elicit_numeric, elicit_worst_case, es_conditional_mean_check, ScoringFunction};
use crate::error::Result;
use crate::kusuoka::{es_mixture_evaluate, m_from_phi, mixture_spectrum, phi_from_m, Spectrum};
use crate::measures::{evaluate, RiskFamily, RiskMeasureSpec};
use crate::orders::{respects_order, Degree, OrderKind, Scope};
use crate::prob::{Position, ScenarioMeasure};
use crate::sampling::{self, SeededRng};
use crate::scalar::{ratio, Rational, Scalar};
use crate::workspace::Workspace;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Tolerance of the float comparisons that are not pinned tighter.
    pub tol: f64,
    /// Seeded instances for the oracle criteria.
    pub instances: usize,
    /// Trials per randomized falsification run.
    pub trials: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-8,
            instances: 200,
            trials: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub checked: usize,
    pub failures: usize,
    /// Largest deviation seen, where the check compares numbers.
    pub max_error: Option<f64>,
    pub note: Option<String>,
    pub witness: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionReport {
    pub id: usize,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<SubCheck>,
}

impl CriterionReport {
    fn new(id: usize, title: &str, checks: Vec<SubCheck>) -> Self {
        Self {
            id,
            title: title.into(),
            passed: checks.iter().all(|c| c.passed),
            checks,
        }
    }

    /// `criterion 3 [PASS] title (a: 200/200, b: ...)`.
    pub fn summary_line(&self) -> String {
        let parts: Vec<String> = self
            .checks
            .iter()
            .map(|c| {
                let mark = if c.passed { "" } else { " FAIL" };
                format!("{}: {}/{}{}", c.name, c.checked - c.failures, c.checked, mark)
            })
            .collect();
        format!(
            "criterion {:>2} [{}] {} ({})",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            parts.join(", ")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub passed: bool,
    pub criteria: Vec<CriterionReport>,
}

/// Counts instances and keeps the first failure.
struct Tally {
    name: String,
    checked: usize,
    failures: usize,
    max_error: Option<f64>,
    note: Option<String>,
    witness: Option<Value>,
}

impl Tally {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            checked: 0,
            failures: 0,
            max_error: None,
            note: None,
            witness: None,
        }
    }

    fn record(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(witness());
            }
        }
    }

    /// Records `|a - b| <= tol`.
    fn close(&mut self, a: f64, b: f64, tol: f64, witness: impl FnOnce() -> Value) {
        let err = (a - b).abs();
        self.max_error = Some(self.max_error.map_or(err, |m| m.max(err)));
        self.record(err <= tol, witness);
    }

    fn note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    fn finish(self) -> SubCheck {
        SubCheck {
            passed: self.failures == 0 && self.checked > 0,
            name: self.name,
            checked: self.checked,
            failures: self.failures,
            max_error: self.max_error,
            note: self.note,
            witness: self.witness,
        }
    }
}

/// A sub-check that must find at least one instance (a counterexample
/// search, or the strict side of an "iff").
fn must_find(name: &str, found: bool, checked: usize, witness: Option<Value>, note: &str) -> SubCheck {
    SubCheck {
        name: name.into(),
        passed: found,
        checked,
        failures: usize::from(!found),
        max_error: None,
        note: Some(note.into()),
        witness,
    }
}

fn error_check(name: &str, e: crate::Error) -> SubCheck {
    SubCheck {
        name: name.into(),
        passed: false,
        checked: 1,
        failures: 1,
        max_error: None,
        note: Some(e.to_string()),
        witness: None,
    }
}

pub fn canonical_position() -> Position {
    Position::new(vec![-10.0, -5.0, 0.0, 5.0]).expect("finite")
}

pub fn skewed_scenario() -> ScenarioMeasure {
    ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).expect("normalized")
}

/// Random probabilities with small integer weights, exact in both backends.
pub fn rational_probabilities(rng: &mut SeededRng, n: usize) -> Vec<Rational> {
    let sparse = rng.gen_bool(0.2);
    let mut w: Vec<i64> = (0..n)
        .map(|_| if sparse && rng.gen_bool(0.3) { 0 } else { rng.gen_range(1..=9) })
        .collect();
    if w.iter().all(|v| *v == 0) {
        w[0] = 1;
    }
    let total: i64 = w.iter().sum();
    w.into_iter().map(|v| ratio(v, total)).collect()
}

/// A payoff vector on the half-integer grid of `[-20, 20]`.
pub fn grid_position(rng: &mut SeededRng, n: usize) -> Vec<Rational> {
    (0..n).map(|_| ratio(rng.gen_range(-40..=40), 2)).collect()
}

fn to_f64s(v: &[Rational]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64).collect()
}

/// Three fixed nonincreasing step spectra.
pub fn step_spectra() -> Vec<Spectrum<Rational>> {
    let build = |steps: &[(i64, i64, i64, i64)]| {
        Spectrum::new(steps.iter().map(|&(a, b, c, d)| (ratio(a, b), ratio(c, d))).collect())
            .expect("integrates to one")
    };
    vec![
        build(&[(0, 1, 2, 1), (1, 4, 1, 1), (1, 2, 1, 2)]),
        build(&[(0, 1, 5, 1), (1, 10, 1, 1), (1, 2, 1, 4), (9, 10, 0, 1)]),
        build(&[(0, 1, 3, 2), (1, 2, 1, 2)]),
    ]
}

/// A nonincreasing step spectrum with up to four steps on a 1/20 grid.
pub fn random_spectrum(rng: &mut SeededRng) -> Spectrum<Rational> {
    let k = rng.gen_range(1..=4);
    let mut cuts: Vec<i64> = Vec::new();
    while cuts.len() < k - 1 {
        let c = rng.gen_range(1..20);
        if !cuts.contains(&c) {
            cuts.push(c);
        }
    }
    cuts.sort_unstable();
    let mut starts = vec![0i64];
    starts.extend(cuts);
    let mut levels: Vec<i64> = (0..k).map(|_| rng.gen_range(0..=10)).collect();
    levels.sort_unstable_by(|a, b| b.cmp(a));
    if levels[0] == 0 {
        levels[0] = 1;
    }
    let ends: Vec<i64> = starts.iter().skip(1).cloned().chain([20]).collect();
    let integral: i64 = levels.iter().zip(starts.iter().zip(&ends)).map(|(l, (s, e))| l * (e - s)).sum();
    let steps = starts
        .iter()
        .zip(&levels)
        .map(|(s, l)| (ratio(*s, 20), ratio(l * 20, integral)))
        .collect();
    Spectrum::new(steps).expect("normalized by construction")
}

/// Direct evaluation from the sorted outcome list, sharing no code with the
/// distribution machinery.
pub fn brute_force_value(spec: &RiskMeasureSpec, x: &[f64], q: &[f64]) -> f64 {
    let mut atoms: Vec<(f64, f64)> = x.iter().cloned().zip(q.iter().cloned()).filter(|(_, p)| *p > 0.0).collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let min = atoms[0].0;
    let integral = |a: f64| {
        let (mut acc, mut c) = (0.0, 0.0);
        for (v, p) in &atoms {
            let take = p.min(a - c).max(0.0);
            acc += take * v;
            c += p;
        }
        acc
    };
    let es = |alpha: f64| if alpha == 0.0 { -min } else { -integral(alpha) / alpha };
    match spec {
        RiskMeasureSpec::ExpectedLoss => -atoms.iter().map(|(v, p)| v * p).sum::<f64>(),
        RiskMeasureSpec::MaxLoss => -min,
        RiskMeasureSpec::ValueAtRisk(alpha) => {
            if *alpha == 0.0 {
                return -min;
            }
            let mut c = 0.0;
            for (v, p) in &atoms {
                c += p;
                if c >= alpha - 1e-12 {
                    return -v;
                }
            }
            -atoms[atoms.len() - 1].0
        }
        RiskMeasureSpec::ExpectedShortfall(alpha) => es(*alpha),
        RiskMeasureSpec::Spectral(phi) => {
            let steps = phi.steps();
            let mut total = 0.0;
            let mut c = 0.0;
            for (v, p) in &atoms {
                let (lo, hi) = (c, c + p);
                for (j, (start, level)) in steps.iter().enumerate() {
                    let end = steps.get(j + 1).map_or(1.0, |s| s.0);
                    let overlap = (hi.min(end) - lo.max(*start)).max(0.0);
                    total += overlap * level * v;
                }
                c = hi;
            }
            -total
        }
        RiskMeasureSpec::EsMixture(m) => m.atoms().iter().map(|(a, w)| w * es(*a)).sum(),
    }
}

/// Criterion 1: every position and scenario of the workspace against the
/// brute-force oracle, plus `ES(1) = EL`.
pub fn base_measures(ws: &Workspace) -> CriterionReport {
    let mut specs = vec![
        RiskMeasureSpec::ExpectedLoss,
        RiskMeasureSpec::ValueAtRisk(0.25),
        RiskMeasureSpec::ExpectedShortfall(0.5),
        RiskMeasureSpec::MaxLoss,
        RiskMeasureSpec::ExpectedShortfall(1.0),
    ];
    specs.extend(ws.measures.values().cloned());
    let mut oracle = Tally::new("oracle");
    let mut es_one = Tally::new("ES(1)=EL");
    for p in &ws.position_order {
        let x = &ws.positions[p];
        for s in &ws.scenario_order {
            let q = &ws.scenarios[s];
            for spec in &specs {
                let witness = || json!({"position": p, "scenario": s, "measure": spec.label()});
                match evaluate(spec, x, q) {
                    Ok(v) => {
                        let expected = brute_force_value(spec, x.values(), q.probs());
                        let tol = 1e-12 * (1.0 + expected.abs());
                        oracle.close(v.value, expected, tol, || {
                            let mut w = witness();
                            w["value"] = json!(v.value);
                            w["oracle"] = json!(expected);
                            w
                        });
                    }
                    Err(e) => oracle.record(false, || json!({"error": e.to_string()})),
                }
            }
            let el = evaluate(&RiskMeasureSpec::ExpectedLoss, x, q).map(|v| v.value);
            let es = evaluate(&RiskMeasureSpec::ExpectedShortfall(1.0), x, q).map(|v| v.value);
            match (el, es) {
                (Ok(a), Ok(b)) => es_one.close(a, b, 1e-12 * (1.0 + a.abs()), || {
                    json!({"position": p, "scenario": s, "EL": a, "ES(1)": b})
                }),
                _ => es_one.record(false, || json!({"position": p, "scenario": s})),
            }
        }
    }
    CriterionReport::new(1, "base-measure oracle", vec![oracle.finish(), es_one.finish()])
}

fn dual_specs() -> Vec<RiskMeasureSpec<Rational>> {
    let mut specs = vec![RiskMeasureSpec::ExpectedLoss];
    for (n, d) in [(1, 10), (1, 4), (1, 2), (9, 10)] {
        specs.push(RiskMeasureSpec::ExpectedShortfall(ratio(n, d)));
    }
    specs.push(RiskMeasureSpec::MaxLoss);
    specs.extend(step_spectra().into_iter().map(RiskMeasureSpec::Spectral));
    specs
}

/// Criterion 2: primal evaluation against the greedy dual certificate and
/// the dual LP, in floats on 4 to 8 atoms and exactly on 4 atoms.
pub fn dual_representation(opts: &SuiteOptions) -> CriterionReport {
    let mut rng = sampling::rng(opts.seed ^ 0x02);
    let specs = dual_specs();
    let mut greedy = Tally::new("primal=greedy dual");
    let mut lp = Tally::new("primal=dual LP");
    let mut exact = Tally::new("exact on 4 atoms");
    for i in 0..opts.instances {
        let n = 4 + i % 5;
        let base_r = ScenarioMeasure::new(rational_probabilities(&mut rng, n)).expect("normalized");
        let x_r = Position::new(grid_position(&mut rng, n)).expect("finite");
        let base = base_r.map_scalar::<f64>();
        let x = x_r.map_scalar::<f64>();
        for spec_r in &specs {
            let spec = spec_r.map_scalar::<f64>();
            let witness = || json!({"measure": spec.label(), "X": x.values(), "P": base.probs()});
            let primal = evaluate(&spec, &x, &base).map(|v| v.value);
            let dual = dual_evaluate(&spec, &x, &base).map(|d| d.value);
            let dual_lp = dual_evaluate_lp(&spec, &x, &base).map(|d| d.value);
            match (primal, dual, dual_lp) {
                (Ok(p), Ok(d), Ok(l)) => {
                    greedy.close(p, d, 1e-8, witness);
                    lp.close(p, l, 1e-8, witness);
                }
                _ => {
                    greedy.record(false, witness);
                    lp.record(false, witness);
                }
            }
            if n == 4 {
                let p = evaluate(spec_r, &x_r, &base_r).map(|v| v.value);
                let d = dual_evaluate(spec_r, &x_r, &base_r).map(|d| d.value);
                let l = dual_evaluate_lp(spec_r, &x_r, &base_r).map(|d| d.value);
                let ok = matches!((&p, &d, &l), (Ok(a), Ok(b), Ok(c)) if a == b && b == c);
                exact.record(ok, || {
                    json!({"measure": spec.label(), "X": x.values(), "P": base.probs(),
                           "primal": p.map(|v| v.to_string()).ok(), "dual": d.map(|v| v.to_string()).ok(),
                           "lp": l.map(|v| v.to_string()).ok()})
                });
            }
        }
    }
    CriterionReport::new(2, "dual representation", vec![greedy.finish(), lp.finish(), exact.finish()])
}

fn es_pair_family(base: &ScenarioMeasure) -> RiskFamily {
    RiskFamily::broadcast(
        &[RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::ExpectedShortfall(0.25)],
        std::slice::from_ref(base),
    )
    .expect("two members")
}

/// Compositions of `total` into `parts` nonnegative integers.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 1 {
        return vec![vec![total]];
    }
    let mut out = Vec::new();
    for head in 0..=total {
        for mut tail in compositions(total - head, parts - 1) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Criterion 3: composed dual check for the ES mixture and the density cap 3
/// of the decomposition LP on the 0.1 density grid.
pub fn mixture_penalty_suite(opts: &SuiteOptions) -> CriterionReport {
    let base = ScenarioMeasure::uniform(4).expect("n > 0");
    let family = es_pair_family(&base);
    let f = CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5]).expect("normalized"));
    let mut rng = sampling::rng(opts.seed ^ 0x03);
    let mut gap = Tally::new("composed gap");
    for _ in 0..opts.instances {
        let x = Position::new(sampling::vector(&mut rng, 4, 20.0)).expect("finite");
        match composed_dual_check(&f, &family, &x, 1e-8) {
            Ok(r) => gap.close(r.lhs, r.rhs, 1e-8, || json!({"X": x.values(), "report": r})),
            Err(e) => gap.record(false, || json!({"X": x.values(), "error": e.to_string()})),
        }
    }
    let mu = IndexWeight::new(vec![0.5, 0.5]).expect("normalized");
    let mut cap = Tally::new("density cap 3");
    for d in compositions(40, 4) {
        let q = ScenarioMeasure::new(d.iter().map(|&k| k as f64 / 40.0).collect());
        let analytic = d.iter().all(|&k| k <= 30);
        match q.and_then(|q| mixture_penalty(&family, &mu, &q)) {
            Ok(p) => cap.record(p.penalty.is_zero() == analytic, || {
                json!({"density": d.iter().map(|&k| k as f64 / 10.0).collect::<Vec<_>>(),
                       "analytic_feasible": analytic, "penalty": p.penalty})
            }),
            Err(e) => cap.record(false, || json!({"density_tenths": d, "error": e.to_string()})),
        }
    }
    CriterionReport::new(3, "mixture penalty", vec![gap.finish(), cap.finish()])
}

/// Criterion 4: membership infimum against the vertex LP infimum on the
/// 1140 points of the 1/17 grid of the 4-simplex.
pub fn worst_case_collapse(_opts: &SuiteOptions) -> CriterionReport {
    let base = ScenarioMeasure::uniform(4).expect("n > 0");
    let family = es_pair_family(&base);
    let mut agree = Tally::new("membership=LP");
    let mut hull_gaps = 0;
    for j in compositions(17, 4) {
        let q = ScenarioMeasure::new(j.iter().map(|&k| k as f64 / 17.0).collect());
        match q.and_then(|q| worst_case_penalty_check(&family, &q)) {
            Ok(r) => {
                if r.hull_penalty != r.membership_inf {
                    hull_gaps += 1;
                }
                agree.record(r.agree, || json!(r));
            }
            Err(e) => agree.record(false, || json!({"grid": j, "error": e.to_string()})),
        }
    }
    let agree = agree.note(format!(
        "{hull_gaps} grid points lie in the convex hull of the dual sets but in neither set"
    ));
    CriterionReport::new(4, "worst-case penalty collapse", vec![agree.finish()])
}

/// Criterion 5: spectrum round trips, Kusuoka equality and mixture
/// linearity.
pub fn kusuoka_layer(opts: &SuiteOptions) -> CriterionReport {
    let mut rng = sampling::rng(opts.seed ^ 0x05);
    let spectra: Vec<Spectrum<Rational>> = (0..50).map(|_| random_spectrum(&mut rng)).collect();

    let mut round = Tally::new("m<->phi round trip");
    for phi in &spectra {
        let back = m_from_phi(phi).map(|m| phi_from_m(&m));
        round.record(back.as_ref() == Ok(phi), || {
            json!({"phi": phi.steps().iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>()})
        });
    }

    let mut equal = Tally::new("mixture=spectral=dual");
    for phi in &spectra {
        let n = rng.gen_range(4..=8);
        let q = ScenarioMeasure::uniform(n).expect("n > 0");
        let x = Position::new(sampling::vector(&mut rng, n, 20.0)).expect("finite");
        let phi = phi.map_scalar::<f64>();
        let spec = RiskMeasureSpec::Spectral(phi.clone());
        let values = (|| -> Result<(f64, f64, f64)> {
            let m = m_from_phi(&phi)?;
            Ok((
                es_mixture_evaluate(&m, &x, &q)?,
                evaluate(&spec, &x, &q)?.value,
                dual_evaluate(&spec, &x, &q)?.value,
            ))
        })();
        match values {
            Ok((a, b, c)) => {
                let w = || json!({"X": x.values(), "measure": spec.label(), "values": [a, b, c]});
                equal.close(a, b, 1e-8, w);
                equal.close(b, c, 1e-8, w);
            }
            Err(e) => equal.record(false, || json!({"error": e.to_string()})),
        }
    }

    let mut linear = Tally::new("mixture linearity");
    for pair in spectra.chunks(2) {
        let n = rng.gen_range(4..=8);
        let q = ScenarioMeasure::<Rational>::uniform(n).expect("n > 0");
        let x = Position::new(grid_position(&mut rng, n)).expect("finite");
        let w = rng.gen_range(0..=10);
        let mu = IndexWeight::new(vec![ratio(w, 10), ratio(10 - w, 10)]).expect("normalized");
        let ok = (|| -> Result<bool> {
            let mixed = mixture_spectrum(pair, &mu)?;
            let lhs = evaluate(&RiskMeasureSpec::Spectral(mixed), &x, &q)?.value;
            let mut rhs = ratio(0, 1);
            for (phi, weight) in pair.iter().zip(mu.weights()) {
                rhs += weight * evaluate(&RiskMeasureSpec::Spectral(phi.clone()), &x, &q)?.value;
            }
            Ok(lhs == rhs)
        })();
        linear.record(ok == Ok(true), || json!({"X": to_f64s(x.values()), "weight": w as f64 / 10.0}));
    }
    CriterionReport::new(5, "Kusuoka layer", vec![round.finish(), equal.finish(), linear.finish()])
}

/// Families over six outcomes with scenario classes `{1,2,3}`, `{4}`, `{5,6}`.
fn coherent_family() -> RiskFamily {
    let uniform = ScenarioMeasure::uniform(6).expect("n > 0");
    let tilted = ScenarioMeasure::new(vec![0.25, 0.25, 0.25, 0.125, 0.0625, 0.0625]).expect("normalized");
    let spectral = RiskMeasureSpec::Spectral(step_spectra()[0].map_scalar());
    RiskFamily::new(vec![
        (RiskMeasureSpec::ExpectedShortfall(0.5), uniform.clone()),
        (RiskMeasureSpec::ExpectedShortfall(0.25), tilted),
        (spectral, uniform),
    ])
    .expect("consistent members")
}

pub fn var_worst_case(alpha: f64) -> ComposedMeasure {
    let family = RiskFamily::broadcast(
        &[RiskMeasureSpec::ValueAtRisk(alpha)],
        &[ScenarioMeasure::uniform(4).expect("n > 0"), skewed_scenario()],
    )
    .expect("two members");
    ComposedMeasure::new(CombinationSpec::WorstCase, family).expect("valid")
}

fn coherent_composites() -> Vec<ComposedMeasure> {
    let family = coherent_family();
    let mix = IndexWeight::new(vec![0.5, 0.3, 0.2]).expect("normalized");
    vec![
        ComposedMeasure::new(CombinationSpec::WorstCase, family.clone()).expect("valid"),
        ComposedMeasure::new(CombinationSpec::Mixture(mix), family).expect("valid"),
    ]
}

fn check_config(opts: &SuiteOptions, salt: u64) -> CheckConfig {
    CheckConfig {
        trials: opts.trials,
        seed: opts.seed ^ salt,
        ..CheckConfig::default()
    }
}

/// Criterion 6: inheritance rows for the worst case and the mixture, and the
/// VaR convexity counterexample.
pub fn axiom_inheritance(opts: &SuiteOptions) -> CriterionReport {
    let mut checks = Vec::new();
    for (c, rho) in coherent_composites().iter().enumerate() {
        for (a, axiom) in RhoAxiom::ALL.iter().enumerate() {
            let config = check_config(opts, 0x600 + (c * 16 + a) as u64);
            let report = check_rho_axiom(rho, *axiom, &config);
            let applicable = axiom.inherited(rho);
            let mut name = format!("{} {:?}", rho.combination().label(), axiom);
            if !applicable {
                name.push_str(" (not inherited)");
            }
            checks.push(SubCheck {
                passed: !applicable || report.passed,
                failures: usize::from(applicable && !report.passed),
                checked: report.trials,
                max_error: None,
                note: (!applicable).then(|| "not inherited; informational".to_string()),
                witness: report.witness.as_ref().map(|w| json!(w)),
                name,
            });
        }
    }
    let var = var_worst_case(0.5);
    let report = check_rho_axiom(&var, RhoAxiom::Convexity, &check_config(opts, 0x6ff));
    checks.push(must_find(
        "VaR convexity counterexample",
        !report.passed,
        report.trials,
        report.witness.as_ref().map(|w| json!(w)),
        "the search must find a violation",
    ));
    CriterionReport::new(6, "axiom inheritance", checks)
}

/// Criterion 7: sampled Lipschitz bound for the coherent composites and the
/// worst case of VaR.
pub fn lipschitz(opts: &SuiteOptions) -> CriterionReport {
    let mut rhos = coherent_composites();
    rhos.push(var_worst_case(0.25));
    let checks = rhos
        .iter()
        .enumerate()
        .map(|(i, rho)| {
            let r = lipschitz_check(rho, &check_config(opts, 0x700 + i as u64));
            SubCheck {
                name: rho.label(),
                passed: r.passed,
                checked: r.trials,
                failures: r.violations,
                max_error: Some(r.max_ratio),
                note: Some("max_error holds the largest observed ratio".into()),
                witness: r.witness.as_ref().map(|w| json!(w)),
            }
        })
        .collect();
    CriterionReport::new(7, "Lipschitz propagation", checks)
}

/// Criterion 8: second-order respect for a mixture of ES and first-order
/// respect for the worst case of VaR, both over the scenario set.
pub fn dominance(opts: &SuiteOptions) -> CriterionReport {
    let scenarios = [ScenarioMeasure::uniform(4).expect("n > 0"), skewed_scenario()];
    let es = RiskFamily::new(vec![
        (RiskMeasureSpec::ExpectedShortfall(0.5), scenarios[0].clone()),
        (RiskMeasureSpec::ExpectedShortfall(0.25), scenarios[1].clone()),
    ])
    .expect("consistent members");
    let mix = ComposedMeasure::new(
        CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5]).expect("normalized")),
        es,
    )
    .expect("valid");
    let cases = [
        (mix, OrderKind::new(Degree::Second, Scope::Set)),
        (var_worst_case(0.25), OrderKind::new(Degree::First, Scope::Set)),
    ];
    let checks = cases
        .iter()
        .enumerate()
        .map(|(i, (rho, kind))| {
            let name = format!("{} respects {}", rho.label(), kind);
            match respects_order(rho, *kind, &check_config(opts, 0x800 + i as u64)) {
                Ok(r) => SubCheck {
                    name,
                    passed: r.passed && r.trials > 0,
                    checked: r.trials,
                    failures: r.violations,
                    max_error: None,
                    note: Some(format!("{} generated pairs failed confirmation", r.rejected)),
                    witness: r.witness.as_ref().map(|w| json!(w)),
                },
                Err(e) => error_check(&name, e),
            }
        })
        .collect();
    CriterionReport::new(8, "dominance respect", checks)
}

/// Criterion 9: closed-form elicitation, the worst-case identity and the
/// conditional-mean reading of ES.
pub fn elicitation(opts: &SuiteOptions) -> CriterionReport {
    let mut rng = sampling::rng(opts.seed ^ 0x09);
    let levels = [ratio(1, 10), ratio(1, 4), ratio(1, 2), ratio(3, 4), ratio(9, 10)];

    let mut closed = Tally::new("closed forms exact");
    let mut numeric = Tally::new("numeric minimizer");
    for _ in 0..opts.instances {
        let n = rng.gen_range(4..=8);
        let q = ScenarioMeasure::new(rational_probabilities(&mut rng, n)).expect("normalized");
        let x = Position::new(grid_position(&mut rng, n)).expect("finite");
        let alpha = levels[rng.gen_range(0..levels.len())].clone();
        let pinball = ScoringFunction::Pinball { alpha: alpha.to_f64() };
        let ok = (|| -> Result<bool> {
            let el = evaluate(&RiskMeasureSpec::ExpectedLoss, &x, &q)?.value;
            let level = <Rational as Scalar>::from_f64(alpha.to_f64());
            let var = evaluate(&RiskMeasureSpec::ValueAtRisk(level), &x, &q)?.value;
            Ok(elicit(&ScoringFunction::SquaredError, &x, &q)? == el && elicit(&pinball, &x, &q)? == var)
        })();
        let (xf, qf) = (x.map_scalar::<f64>(), q.map_scalar::<f64>());
        let w = || json!({"X": xf.values(), "Q": qf.probs(), "alpha": alpha.to_f64()});
        closed.record(ok == Ok(true), w);
        let resolution = (xf.max_value() - xf.min_value()).max(1.0) / 1e6;
        for s in [ScoringFunction::SquaredError, pinball] {
            match (elicit(&s, &xf, &qf), elicit_numeric(&s, &xf, &qf, Some(resolution))) {
                (Ok(a), Ok(b)) => numeric.close(a, b, 2.0 * resolution, w),
                _ => numeric.record(false, w),
            }
        }
    }

    let mut worked = Tally::new("worked example 5.0");
    let scenarios = [ScenarioMeasure::uniform(4).expect("n > 0"), skewed_scenario()];
    match elicit_worst_case(&ScoringFunction::SquaredError, &canonical_position(), &scenarios, None) {
        Ok(r) => worked.close(r.value, 5.0, 2.0 * r.resolution, || json!(r)),
        Err(e) => worked.record(false, || json!({"error": e.to_string()})),
    }

    let mut minimax = Tally::new("worst-case identity");
    for i in 0..50 {
        let n = rng.gen_range(4..=6);
        let k = 2 + i % 2;
        let x = Position::new(sampling::vector(&mut rng, n, 20.0)).expect("finite");
        let qs: Vec<ScenarioMeasure> = (0..k)
            .map(|_| ScenarioMeasure::new(to_f64s(&rational_probabilities(&mut rng, n))).expect("normalized"))
            .collect();
        let s = if i % 4 < 2 {
            ScoringFunction::SquaredError
        } else {
            ScoringFunction::Pinball { alpha: levels[rng.gen_range(0..levels.len())].to_f64() }
        };
        match elicit_worst_case(&s, &x, &qs, None) {
            Ok(r) => minimax.record(r.agrees, || {
                json!({"scoring": s.to_string(), "X": x.values(),
                       "scenarios": qs.iter().map(|q| q.probs().to_vec()).collect::<Vec<_>>(), "result": r})
            }),
            Err(e) => minimax.record(false, || json!({"error": e.to_string()})),
        }
    }
    let minimax = minimax.note(
        "the envelope argmin follows the branch with the smallest minimal score, \
         which need not carry the largest elicited value",
    );

    let mut tail = Tally::new("ES conditional mean");
    let mut tied = 0;
    for _ in 0..opts.instances {
        let n = rng.gen_range(4..=8);
        let p = ScenarioMeasure::uniform(n).expect("n > 0");
        let x = Position::new(sampling::vector(&mut rng, n, 20.0)).expect("finite");
        let alpha = rng.gen_range(1..=n) as f64 / n as f64;
        match es_conditional_mean_check(&x, &p, &alpha) {
            Ok(Some(r)) => tail.close(r.elicited, r.expected_shortfall, 1e-8, || {
                json!({"X": x.values(), "P": p.probs(), "alpha": alpha, "result": r})
            }),
            Ok(None) => tied += 1,
            Err(e) => tail.record(false, || json!({"error": e.to_string()})),
        }
    }
    let tail = tail.note(format!("{tied} tied instances excluded"));
    CriterionReport::new(
        9,
        "elicitation",
        vec![closed.finish(), numeric.finish(), worked.finish(), minimax.finish(), tail.finish()],
    )
}

/// Criterion 10: `rho^{Q^mu}(X) >= sum_i mu_i rho^{Q_i}(X)` for convex
/// components, with equality on every instance for EL and a strict instance
/// for every other kind.
pub fn mixed_scenario(opts: &SuiteOptions) -> CriterionReport {
    let mut rng = sampling::rng(opts.seed ^ 0x0a);
    let mut specs = vec![
        RiskMeasureSpec::ExpectedLoss,
        RiskMeasureSpec::ExpectedShortfall(0.1),
        RiskMeasureSpec::ExpectedShortfall(0.5),
        RiskMeasureSpec::MaxLoss,
    ];
    specs.extend(step_spectra().iter().map(|s| RiskMeasureSpec::Spectral(s.map_scalar())));
    let mut ineq = Tally::new("inequality");
    let mut el_equal = Tally::new("EL equality");
    let mut strict: BTreeMap<String, Option<Value>> = specs.iter().skip(1).map(|s| (s.label(), None)).collect();
    for _ in 0..opts.instances {
        let n = rng.gen_range(4..=8);
        let qs = [
            ScenarioMeasure::new(sampling::probabilities(&mut rng, n)).expect("normalized"),
            ScenarioMeasure::new(sampling::probabilities(&mut rng, n)).expect("normalized"),
        ];
        let w = sampling::unit_interval(&mut rng);
        let mu = [w, 1.0 - w];
        let x = Position::new(sampling::vector(&mut rng, n, 20.0)).expect("finite");
        for spec in &specs {
            let values = (|| -> Result<(f64, f64)> {
                let mixed = ScenarioMeasure::mixture(&mu, &qs)?;
                let lhs = evaluate(spec, &x, &mixed)?.value;
                let rhs = mu[0] * evaluate(spec, &x, &qs[0])?.value + mu[1] * evaluate(spec, &x, &qs[1])?.value;
                Ok((lhs, rhs))
            })();
            let witness = || {
                json!({"measure": spec.label(), "X": x.values(), "mu": mu,
                       "scenarios": [qs[0].probs(), qs[1].probs()], "values": values.as_ref().ok()})
            };
            let Ok((lhs, rhs)) = values else {
                ineq.record(false, witness);
                continue;
            };
            ineq.record(lhs >= rhs - 1e-10, witness);
            if *spec == RiskMeasureSpec::ExpectedLoss {
                el_equal.close(lhs, rhs, 1e-10, witness);
            } else if lhs > rhs + 1e-10 {
                strict.get_mut(&spec.label()).expect("listed").get_or_insert_with(witness);
            }
        }
    }
    let mut checks = vec![ineq.finish(), el_equal.finish()];
    for (label, witness) in strict {
        checks.push(must_find(
            &format!("{label} strict somewhere"),
            witness.is_some(),
            opts.instances,
            witness,
            "equality only for EL",
        ));
    }
    CriterionReport::new(10, "mixed-scenario inequality", checks)
}

/// Runs all ten criteria. Criterion 1 reads the workspace; the rest draw
/// seeded instances.
pub fn run(ws: &Workspace, opts: &SuiteOptions) -> SuiteReport {
    let criteria = vec![
        base_measures(ws),
        dual_representation(opts),
        mixture_penalty_suite(opts),
        worst_case_collapse(opts),
        kusuoka_layer(opts),
        axiom_inheritance(opts),
        lipschitz(opts),
        dominance(opts),
        elicitation(opts),
        mixed_scenario(opts),
    ];
    SuiteReport {
        seed: opts.seed,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brute_force_matches_canonical_values() {
        let x = canonical_position();
        let q = [0.25; 4];
        let cases = [
            (RiskMeasureSpec::ExpectedLoss, 2.5),
            (RiskMeasureSpec::ValueAtRisk(0.25), 10.0),
            (RiskMeasureSpec::ExpectedShortfall(0.5), 7.5),
            (RiskMeasureSpec::MaxLoss, 10.0),
        ];
        for (spec, v) in cases {
            assert_eq!(brute_force_value(&spec, x.values(), &q), v, "{spec}");
        }
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(17, 4).len(), 1140);
        assert_eq!(compositions(40, 4).len(), 12341);
    }

    #[test]
    fn random_spectra_are_valid() {
        let mut rng = sampling::rng(3);
        for _ in 0..20 {
            let s = random_spectrum(&mut rng);
            assert!(s.is_nonincreasing());
        }
    }
}
