//! Stochastic dominance under a scenario set, and whether a composed
//! measure respects it.

use risk_compose::combinators::{CheckConfig, CombinationSpec, ComposedMeasure, IndexWeight};
use risk_compose::measures::{RiskFamily, RiskMeasureSpec};
use risk_compose::orders::{dominates, respects_order, OrderKind};
use risk_compose::prob::{Position, ScenarioMeasure};

fn main() -> risk_compose::Result<()> {
    let scenarios = vec![ScenarioMeasure::uniform(4)?, ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1])?];
    let x = Position::new(vec![-5.0, -5.0, 0.0, 0.0])?;
    let y = Position::new(vec![-10.0, -5.0, 0.0, 5.0])?;
    for order in ["1,I", "2,I"] {
        let r = dominates(&x, &y, order.parse::<OrderKind>()?, &scenarios)?;
        println!("X over Y at {order}: {} (level {:?})", r.holds, r.witness_level);
    }

    let family = RiskFamily::broadcast(&[RiskMeasureSpec::ExpectedShortfall(0.5)], &scenarios)?;
    let rho = ComposedMeasure::new(CombinationSpec::Mixture(IndexWeight::uniform(2)?), family)?;
    let config = CheckConfig { trials: 2000, ..CheckConfig::default() };
    let r = respects_order(&rho, "2,I".parse()?, &config)?;
    println!("{} respects {}: {} ({} violations in {} trials)", r.subject, r.order, r.passed, r.violations, r.trials);
    Ok(())
}
