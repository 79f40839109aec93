//! One position, several scenarios, three ways to aggregate the profile.

use risk_compose::combinators::{combine, CombinationSpec, IndexWeight};
use risk_compose::measures::{RiskFamily, RiskMeasureSpec};
use risk_compose::prob::{Position, ScenarioMeasure};

fn main() -> risk_compose::Result<()> {
    let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0])?;
    let scenarios = [
        ScenarioMeasure::uniform(4)?,
        ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1])?,
        ScenarioMeasure::new(vec![0.1, 0.2, 0.3, 0.4])?,
    ];
    let family = RiskFamily::broadcast(&[RiskMeasureSpec::ExpectedShortfall(0.5)], &scenarios)?;
    let profile = family.profile(&x)?;
    println!("profile {:?}", profile.entries());

    let combos = [
        CombinationSpec::WorstCase,
        CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.25, 0.25])?),
        CombinationSpec::UtilityOfProfile {
            pi: RiskMeasureSpec::ExpectedShortfall(0.5),
            weights: IndexWeight::new(vec![0.5, 0.25, 0.25])?,
        },
    ];
    for f in &combos {
        println!("{:<40} {:>8.4}", f.label(), combine(f, &profile)?);
    }
    Ok(())
}
