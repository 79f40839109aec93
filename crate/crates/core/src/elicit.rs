//! Scoring functions and elicitation: `rho(X) = -argmin_y E_Q[S(X, y)]`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::measures::expected_shortfall;
use crate::prob::{distribution, Position, ScenarioMeasure};
use crate::scalar::Scalar;

/// Default grid: `10^6` cells over `[min X, max X]`.
pub const DEFAULT_CELLS: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum ScoringFunction {
    /// `(x - y)^2`, eliciting the mean.
    SquaredError,
    /// `a (x - y)^+ + (1 - a) (x - y)^-`, eliciting the `a`-quantile.
    Pinball { alpha: f64 },
}

impl ScoringFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            ScoringFunction::Pinball { alpha } if !(*alpha > 0.0 && *alpha < 1.0) => {
                Err(Error::domain(format!("pinball level {alpha} outside (0, 1)")))
            }
            _ => Ok(()),
        }
    }

    pub fn score<T: Scalar>(&self, x: &T, y: &T) -> T {
        let d = x.clone() - y.clone();
        match self {
            ScoringFunction::SquaredError => d.clone() * d,
            ScoringFunction::Pinball { alpha } => {
                let a = T::from_f64(*alpha);
                if d.gt_zero() {
                    a * d
                } else {
                    (T::one() - a) * (-d)
                }
            }
        }
    }
}

impl fmt::Display for ScoringFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoringFunction::SquaredError => f.write_str("squared"),
            ScoringFunction::Pinball { alpha } => write!(f, "pinball:{alpha}"),
        }
    }
}

/// `squared` or `pinball:<alpha>`.
impl FromStr for ScoringFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k.trim(), Some(a.trim())),
            None => (s.trim(), None),
        };
        let scoring = match (kind.to_ascii_lowercase().as_str(), arg) {
            ("squared" | "squarederror", None) => ScoringFunction::SquaredError,
            ("pinball", Some(a)) => ScoringFunction::Pinball {
                alpha: a
                    .parse()
                    .map_err(|_| Error::domain(format!("cannot parse pinball level `{a}`")))?,
            },
            _ => return Err(Error::domain(format!("unknown scoring function `{s}`"))),
        };
        scoring.validate()?;
        Ok(scoring)
    }
}

/// `E_Q[S(X, y)]`.
pub fn expected_score<T: Scalar>(
    s: &ScoringFunction,
    x: &Position<T>,
    q: &ScenarioMeasure<T>,
    y: &T,
) -> Result<T> {
    check_len(q.len(), x.len())?;
    Ok(x.values()
        .iter()
        .zip(q.probs())
        .fold(T::zero(), |acc, (v, p)| acc + p.clone() * s.score(v, y)))
}

/// Closed form of `-argmin_y E_Q[S(X, y)]`: `-E_Q[X]` for the squared error,
/// `-F^{-1}(alpha)` (left end of the flat minimum) for the pinball loss.
pub fn elicit<T: Scalar>(s: &ScoringFunction, x: &Position<T>, q: &ScenarioMeasure<T>) -> Result<T> {
    s.validate()?;
    match s {
        ScoringFunction::SquaredError => Ok(-q.expectation(x)?),
        ScoringFunction::Pinball { alpha } => Ok(-distribution(x, q)?.quantile(&T::from_f64(*alpha))?),
    }
}

fn default_resolution(x: &Position) -> f64 {
    (x.max_value() - x.min_value()) / DEFAULT_CELLS
}

/// Grid search over `[lo, hi]` with step `r`, keeping the leftmost minimum.
fn grid_argmin(lo: f64, hi: f64, r: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    let cells = ((hi - lo) / r).ceil() as usize;
    let mut best = (lo, f(lo));
    for j in 1..=cells {
        let y = (lo + j as f64 * r).min(hi);
        let v = f(y);
        if v < best.1 - 1e-12 * (1.0 + best.1.abs()) {
            best = (y, v);
        }
    }
    best.0
}

/// Ternary search of a convex `f` on `[lo, hi]`, biased to the left on
/// flat stretches.
fn ternary(mut lo: f64, mut hi: f64, f: &dyn Fn(f64) -> f64) -> f64 {
    for _ in 0..200 {
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        let a = lo + (hi - lo) / 3.0;
        let b = hi - (hi - lo) / 3.0;
        if f(a) <= f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    lo
}

/// Numerical `-argmin_y E_Q[S(X, y)]` over `G = [min X, max X]`: a grid of
/// step `resolution` refined by ternary search around the best cell.
pub fn elicit_numeric(
    s: &ScoringFunction,
    x: &Position,
    q: &ScenarioMeasure,
    resolution: Option<f64>,
) -> Result<f64> {
    s.validate()?;
    check_len(q.len(), x.len())?;
    let (lo, hi) = (x.min_value(), x.max_value());
    if lo == hi {
        return Ok(-lo);
    }
    let r = resolution.unwrap_or_else(|| default_resolution(x));
    let f = |y: f64| expected_score(s, x, q, &y).expect("dimensions checked");
    let y = grid_argmin(lo, hi, r, &f);
    Ok(-ternary((y - r).max(lo), (y + r).min(hi), &f))
}

/// Outcome of [`elicit_worst_case`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WorstCaseElicitation {
    /// `-argmin_{y in G} min_i E_{Q_i}[S(X, y)]`.
    pub value: f64,
    pub argmin: f64,
    /// Scenario attaining the inner minimum at the argmin.
    pub active_scenario: usize,
    /// `elicit(S, X, Q_i)` for every scenario.
    pub per_scenario: Vec<f64>,
    /// `max_i elicit(S, X, Q_i)`, the worst-case risk.
    pub max_single: f64,
    pub resolution: f64,
    /// `|value - max_single| <= 2 * resolution`.
    pub agrees: bool,
}

/// Minimizes the lower envelope `min_i E_{Q_i}[S(X, y)]` over `G` and
/// compares with the worst case of the per-scenario elicited values. The
/// inner infimum over the convex hull of the scenarios is attained at a
/// vertex, so only the listed scenarios are scanned.
pub fn elicit_worst_case(
    s: &ScoringFunction,
    x: &Position,
    scenarios: &[ScenarioMeasure],
    resolution: Option<f64>,
) -> Result<WorstCaseElicitation> {
    s.validate()?;
    if scenarios.is_empty() {
        return Err(Error::domain("empty scenario set"));
    }
    for q in scenarios {
        check_len(x.len(), q.len())?;
    }
    let per_scenario = scenarios
        .iter()
        .map(|q| elicit(s, x, q))
        .collect::<Result<Vec<f64>>>()?;
    let max_single = per_scenario.iter().cloned().fold(f64::NEG_INFINITY, f64::max);

    let (lo, hi) = (x.min_value(), x.max_value());
    let r = resolution.unwrap_or_else(|| default_resolution(x));
    let branch = |i: usize, y: f64| expected_score(s, x, &scenarios[i], &y).expect("dimensions checked");
    let envelope = |y: f64| (0..scenarios.len()).map(|i| branch(i, y)).fold(f64::INFINITY, f64::min);
    let active_at = |y: f64| {
        (0..scenarios.len())
            .min_by(|&a, &b| branch(a, y).total_cmp(&branch(b, y)))
            .expect("non-empty scenario set")
    };

    let (argmin, active) = if lo == hi {
        (lo, 0)
    } else {
        let y = grid_argmin(lo, hi, r, &envelope);
        let active = active_at(y);
        let refined = ternary((y - r).max(lo), (y + r).min(hi), &|t| branch(active, t));
        (refined, active)
    };
    let value = -argmin;
    let agrees = (value - max_single).abs() <= 2.0 * r + 1e-12;
    Ok(WorstCaseElicitation {
        value,
        argmin,
        active_scenario: active,
        per_scenario,
        max_single,
        resolution: r,
        agrees,
    })
}

/// The tail scenario `dQ_X/dP = (1/alpha) 1{X <= F^{-1}(alpha)}` and
/// `ES(alpha)` elicited from it by the squared error. `None` when the
/// quantile sits on an atom that straddles `alpha` (the density above is
/// then not a probability).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalMeanCheck {
    pub tail_scenario: Vec<f64>,
    pub elicited: f64,
    pub expected_shortfall: f64,
    pub gap: f64,
}

pub fn es_conditional_mean_check<T: Scalar>(
    x: &Position<T>,
    p: &ScenarioMeasure<T>,
    alpha: &T,
) -> Result<Option<ConditionalMeanCheck>> {
    if !alpha.gt_zero() || *alpha > T::one() {
        return Err(Error::domain(format!("ES level {alpha} outside (0, 1]")));
    }
    let dist = distribution(x, p)?;
    let q_alpha = dist.quantile(alpha)?;
    let tail_mass = x
        .values()
        .iter()
        .zip(p.probs())
        .filter(|(v, _)| **v <= q_alpha)
        .fold(T::zero(), |acc, (_, pk)| acc + pk.clone());
    if (tail_mass - alpha.clone()).abs() > T::tol(1e-12) {
        return Ok(None);
    }
    let density: Vec<T> = x
        .values()
        .iter()
        .map(|v| if *v <= q_alpha { T::one() / alpha.clone() } else { T::zero() })
        .collect();
    let tail = ScenarioMeasure::from_density(p, &density)?;
    let elicited = elicit(&ScoringFunction::SquaredError, x, &tail)?;
    let es = expected_shortfall(&dist, alpha)?;
    Ok(Some(ConditionalMeanCheck {
        tail_scenario: tail.probs().iter().map(|v| v.to_f64()).collect(),
        elicited: elicited.to_f64(),
        expected_shortfall: es.to_f64(),
        gap: (elicited - es).to_f64(),
    }))
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

    #[test]
    fn expected_scores() {
        let v = expected_score(&ScoringFunction::SquaredError, &canonical(), &uniform(), &-2.5).unwrap();
        assert_eq!(v, 31.25);
        let c = Position::constant(4, 3.0);
        for s in [ScoringFunction::SquaredError, ScoringFunction::Pinball { alpha: 0.25 }] {
            assert_eq!(expected_score(&s, &c, &uniform(), &3.0).unwrap(), 0.0);
        }
        let pin = expected_score(&ScoringFunction::Pinball { alpha: 0.25 }, &canonical(), &uniform(), &-10.0)
            .unwrap();
        assert_eq!(pin, 0.25 * 0.25 * (0.0 + 5.0 + 10.0 + 15.0));
    }

    #[test]
    fn closed_forms() {
        assert_eq!(elicit(&ScoringFunction::SquaredError, &canonical(), &skewed()).unwrap(), 5.0);
        assert_eq!(
            elicit(&ScoringFunction::Pinball { alpha: 0.25 }, &canonical(), &uniform()).unwrap(),
            10.0
        );
        let c = Position::constant(4, 3.0);
        assert_eq!(elicit(&ScoringFunction::SquaredError, &c, &uniform()).unwrap(), -3.0);
        assert_eq!(elicit(&ScoringFunction::Pinball { alpha: 0.7 }, &c, &uniform()).unwrap(), -3.0);
    }

    #[test]
    fn numeric_agrees_with_closed_form() {
        for s in [ScoringFunction::SquaredError, ScoringFunction::Pinball { alpha: 0.3 }] {
            let exact = elicit(&s, &canonical(), &skewed()).unwrap();
            let numeric = elicit_numeric(&s, &canonical(), &skewed(), Some(1e-4)).unwrap();
            assert!((exact - numeric).abs() <= 2e-4, "{s}: {exact} vs {numeric}");
        }
    }

    #[test]
    fn worked_worst_case() {
        let report =
            elicit_worst_case(&ScoringFunction::SquaredError, &canonical(), &[uniform(), skewed()], None).unwrap();
        assert!((report.value - 5.0).abs() <= 2.0 * report.resolution);
        assert_eq!(report.active_scenario, 1);
        assert!(report.agrees);
        let single = elicit_worst_case(&ScoringFunction::SquaredError, &canonical(), &[skewed()], None).unwrap();
        assert!((single.value - 5.0).abs() <= 2.0 * single.resolution);
    }

    #[test]
    fn es_as_tail_mean() {
        let x = Position::new(vec![ratio(-10, 1), ratio(-5, 1), ratio(0, 1), ratio(5, 1)]).unwrap();
        let p = ScenarioMeasure::<Rational>::uniform(4).unwrap();
        let check = es_conditional_mean_check(&x, &p, &ratio(1, 2)).unwrap().unwrap();
        assert_eq!(check.elicited, 7.5);
        assert_eq!(check.gap, 0.0);
        assert!(es_conditional_mean_check(&x, &p, &ratio(1, 3)).unwrap().is_none());
    }

    #[test]
    fn parse_scoring() {
        assert_eq!("squared".parse::<ScoringFunction>().unwrap(), ScoringFunction::SquaredError);
        assert_eq!(
            "pinball:0.25".parse::<ScoringFunction>().unwrap(),
            ScoringFunction::Pinball { alpha: 0.25 }
        );
        assert!("pinball:1".parse::<ScoringFunction>().is_err());
    }
}
