//! First- and second-order stochastic dominance under one scenario or a
//! whole scenario set, and randomized dominance-respect checks.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::combinators::{CheckConfig, ComposedMeasure, Witness};
use crate::error::{check_len, Error, Result};
use crate::prob::{distribution, Distribution, Position, ScenarioMeasure};
use crate::sampling::{self, SeededRng};
use crate::scalar::{cmp, max_of, Scalar};

const DOMINANCE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degree {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    /// Exactly one scenario.
    Single,
    /// Every scenario of the set.
    Set,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderKind {
    pub degree: Degree,
    pub scope: Scope,
}

impl OrderKind {
    pub fn new(degree: Degree, scope: Scope) -> Self {
        Self { degree, scope }
    }
}

impl fmt::Display for OrderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.degree {
            Degree::First => 1,
            Degree::Second => 2,
        };
        let s = match self.scope {
            Scope::Single => "Q",
            Scope::Set => "I",
        };
        write!(f, "{d},{s}")
    }
}

/// `1`, `2`, `1,Q`, `2,I` and so on; the scope defaults to the scenario set.
impl FromStr for OrderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (d, sc) = s.split_once(',').unwrap_or((s, "I"));
        let degree = match d.trim() {
            "1" => Degree::First,
            "2" => Degree::Second,
            other => return Err(Error::domain(format!("unknown dominance degree `{other}`"))),
        };
        let scope = match sc.trim() {
            "Q" | "q" => Scope::Single,
            "I" | "i" => Scope::Set,
            other => return Err(Error::domain(format!("unknown dominance scope `{other}`"))),
        };
        Ok(Self { degree, scope })
    }
}

/// Outcome of [`dominates`], with the first failing level when it fails.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceResult {
    pub holds: bool,
    /// Quantile level where the comparison fails.
    pub witness_level: Option<f64>,
    /// Index of the scenario under which it fails.
    pub witness_scenario: Option<usize>,
}

/// Merged cumulative levels of two distributions.
fn merged_levels<T: Scalar>(a: &Distribution<T>, b: &Distribution<T>) -> Vec<T> {
    let mut levels = a.breakpoints();
    levels.extend(b.breakpoints());
    levels.sort_by(cmp);
    levels.dedup();
    levels
}

fn scale_of<T: Scalar>(x: &Position<T>, y: &Position<T>) -> T {
    let m = max_of(
        max_of(x.max_value().abs(), x.min_value().abs()),
        max_of(y.max_value().abs(), y.min_value().abs()),
    );
    T::one() + m
}

/// First failing level of `X >= Y` under one scenario, if any.
fn failing_level<T: Scalar>(
    x: &Position<T>,
    y: &Position<T>,
    degree: Degree,
    q: &ScenarioMeasure<T>,
) -> Result<Option<T>> {
    let fx = distribution(x, q)?;
    let fy = distribution(y, q)?;
    let tol = T::tol(DOMINANCE_TOL) * scale_of(x, y);
    for level in merged_levels(&fx, &fy) {
        let (a, b) = match degree {
            Degree::First => (fx.quantile(&level)?, fy.quantile(&level)?),
            Degree::Second => (fx.integrated_quantile(&level)?, fy.integrated_quantile(&level)?),
        };
        if a < b - tol.clone() {
            return Ok(Some(level));
        }
    }
    Ok(None)
}

/// `X` dominates `Y`: `F^{-1}_X >= F^{-1}_Y` (first order) or
/// `int_0^a F^{-1}_X >= int_0^a F^{-1}_Y` (second order) at every level,
/// under the single scenario or under all of them.
pub fn dominates<T: Scalar>(
    x: &Position<T>,
    y: &Position<T>,
    kind: OrderKind,
    scenarios: &[ScenarioMeasure<T>],
) -> Result<DominanceResult> {
    check_len(x.len(), y.len())?;
    match (kind.scope, scenarios.len()) {
        (_, 0) => return Err(Error::domain("empty scenario set")),
        (Scope::Single, n) if n != 1 => {
            return Err(Error::domain(format!("single-scenario dominance given {n} scenarios")))
        }
        _ => {}
    }
    for (i, q) in scenarios.iter().enumerate() {
        if let Some(level) = failing_level(x, y, kind.degree, q)? {
            return Ok(DominanceResult {
                holds: false,
                witness_level: Some(level.to_f64()),
                witness_scenario: Some(i),
            });
        }
    }
    Ok(DominanceResult {
        holds: true,
        witness_level: None,
        witness_scenario: None,
    })
}

/// Outcome of [`respects_order`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RespectReport {
    pub subject: String,
    pub order: String,
    /// Whether respect follows from the components and the combination.
    pub expected: bool,
    /// Pairs whose dominance was confirmed by [`dominates`] and tested.
    pub trials: usize,
    /// Generated pairs that failed the dominance confirmation.
    pub rejected: usize,
    pub violations: usize,
    pub passed: bool,
    pub witness: Option<Witness>,
}

/// A pair `(X, Y)` with `X` dominating `Y` under every scenario, by
/// construction. First order: `X = Y + d` with `d >= 0`. Second order:
/// `X = l Y + (1 - l) max_i E_{Q_i}[Y] + d`, a mean-preserving contraction
/// towards the largest scenario mean, lifted by `d >= 0`.
fn dominated_pair(
    rng: &mut SeededRng,
    degree: Degree,
    scenarios: &[ScenarioMeasure],
    n: usize,
    scale: f64,
) -> (Vec<f64>, Vec<f64>) {
    let y = sampling::vector(rng, n, scale);
    let lift: Vec<f64> = if rng.gen_bool(0.3) {
        vec![0.0; n]
    } else {
        let size = scale * 0.2 * rng.gen_range(0.0..=1.0);
        (0..n).map(|_| if rng.gen_bool(0.5) { 0.0 } else { size * rng.gen_range(0.0..=1.0) }).collect()
    };
    let x = match degree {
        Degree::First => y.iter().zip(&lift).map(|(a, d)| a + d).collect(),
        Degree::Second => {
            let top = scenarios
                .iter()
                .map(|q| q.probs().iter().zip(&y).map(|(p, v)| p * v).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            let lambda = sampling::unit_interval(rng);
            y.iter()
                .zip(&lift)
                .map(|(v, d)| lambda * v + (1.0 - lambda) * top + d)
                .collect()
        }
    };
    (x, y)
}

/// Draws dominated pairs and counts pairs with `rho(X) > rho(Y)`.
pub fn respects_order(rho: &ComposedMeasure, kind: OrderKind, config: &CheckConfig) -> Result<RespectReport> {
    let scenarios: Vec<ScenarioMeasure> = rho.family().scenarios().cloned().collect();
    let mut distinct: Vec<ScenarioMeasure> = Vec::new();
    for q in scenarios {
        if !distinct.contains(&q) {
            distinct.push(q);
        }
    }
    if kind.scope == Scope::Single && distinct.len() != 1 {
        return Err(Error::domain(
            "single-scenario dominance needs a family read under one scenario",
        ));
    }
    let n = rho.outcomes();
    let mut rng = sampling::rng(config.seed);
    let (mut trials, mut rejected, mut violations) = (0, 0, 0);
    let mut witness = None;
    while trials + rejected < config.trials {
        let (xv, yv) = dominated_pair(&mut rng, kind.degree, &distinct, n, config.scale);
        let x = Position::new(xv)?;
        let y = Position::new(yv)?;
        if !dominates(&x, &y, kind, &distinct)?.holds {
            rejected += 1;
            continue;
        }
        trials += 1;
        let (rx, ry) = (rho.evaluate(&x)?, rho.evaluate(&y)?);
        let tol = config.tol * (1.0 + rx.abs().max(ry.abs()));
        if rx > ry + tol {
            violations += 1;
            witness.get_or_insert_with(|| Witness {
                vectors: [("X".to_string(), x.values().to_vec()), ("Y".to_string(), y.values().to_vec())]
                    .into_iter()
                    .collect(),
                scalars: Default::default(),
                lhs: rx,
                rhs: ry,
                relation: "rho(X) <= rho(Y) when X dominates Y".into(),
            });
        }
    }
    let expected = match kind.degree {
        Degree::First => rho.combination().properties().monotone,
        Degree::Second => {
            rho.combination().properties().monotone && rho.family().specs().all(|s| s.is_convex())
        }
    };
    Ok(RespectReport {
        subject: rho.label(),
        order: kind.to_string(),
        expected,
        trials,
        rejected,
        violations,
        passed: violations == 0,
        witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform() -> ScenarioMeasure {
        ScenarioMeasure::uniform(4).unwrap()
    }

    fn pos(v: &[f64]) -> Position {
        Position::new(v.to_vec()).unwrap()
    }

    #[test]
    fn second_order_example() {
        let x = pos(&[-5.0, -5.0, 0.0, 0.0]);
        let y = pos(&[-10.0, -5.0, 0.0, 5.0]);
        let kind = OrderKind::new(Degree::Second, Scope::Single);
        assert!(dominates(&x, &y, kind, &[uniform()]).unwrap().holds);
        let back = dominates(&y, &x, kind, &[uniform()]).unwrap();
        assert!(!back.holds);
        assert_eq!(back.witness_level, Some(0.25));
        let first = OrderKind::new(Degree::First, Scope::Single);
        assert!(!dominates(&x, &y, first, &[uniform()]).unwrap().holds);
    }

    #[test]
    fn reflexive_and_law_based() {
        let y = pos(&[-10.0, -5.0, 0.0, 5.0]);
        for degree in [Degree::First, Degree::Second] {
            let kind = OrderKind::new(degree, Scope::Set);
            let skewed = ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1]).unwrap();
            assert!(dominates(&y, &y, kind, &[uniform(), skewed]).unwrap().holds);
        }
        let half = ScenarioMeasure::new(vec![0.5, 0.5]).unwrap();
        let a = pos(&[0.0, 10.0]);
        let b = pos(&[10.0, 0.0]);
        let kind = OrderKind::new(Degree::First, Scope::Single);
        assert!(dominates(&a, &b, kind, std::slice::from_ref(&half)).unwrap().holds);
        assert!(dominates(&b, &a, kind, &[half]).unwrap().holds);
    }

    #[test]
    fn scope_validation() {
        let y = pos(&[1.0, 2.0, 3.0, 4.0]);
        let kind = OrderKind::new(Degree::First, Scope::Single);
        assert!(dominates(&y, &y, kind, &[]).is_err());
        assert!(dominates(&y, &y, kind, &[uniform(), uniform()]).is_err());
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("2".parse::<OrderKind>().unwrap(), OrderKind::new(Degree::Second, Scope::Set));
        assert_eq!("1,Q".parse::<OrderKind>().unwrap(), OrderKind::new(Degree::First, Scope::Single));
        assert!("3".parse::<OrderKind>().is_err());
    }
}
