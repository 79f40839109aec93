//! Randomized falsification of axioms for two composed measures. A failing
//! row comes with a witness.

use risk_compose::combinators::{check_rho_axiom, CheckConfig, CombinationSpec, ComposedMeasure, RhoAxiom};
use risk_compose::measures::{RiskFamily, RiskMeasureSpec};
use risk_compose::prob::ScenarioMeasure;

fn main() -> risk_compose::Result<()> {
    let scenarios = [ScenarioMeasure::uniform(4)?, ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1])?];
    let config = CheckConfig { trials: 2000, ..CheckConfig::default() };
    for spec in [RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::ValueAtRisk(0.5)] {
        let rho = ComposedMeasure::new(CombinationSpec::WorstCase, RiskFamily::broadcast(&[spec], &scenarios)?)?;
        println!("{}", rho.label());
        for axiom in RhoAxiom::ALL {
            let r = check_rho_axiom(&rho, axiom, &config);
            println!("  {:<24} inherited={:<5} violated={}", r.axiom, axiom.inherited(&rho), !r.passed);
            if let Some(w) = r.witness {
                println!("    {} {} {}", w.lhs, w.relation, w.rhs);
            }
        }
    }
    Ok(())
}
