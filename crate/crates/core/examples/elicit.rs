//! Elicitation by scoring functions, one scenario at a time and against the
//! worst case over a set.

use risk_compose::elicit::{elicit, elicit_worst_case, ScoringFunction};
use risk_compose::prob::{Position, ScenarioMeasure};

fn main() -> risk_compose::Result<()> {
    let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0])?;
    let scenarios = [ScenarioMeasure::uniform(4)?, ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1])?];
    for s in [ScoringFunction::SquaredError, ScoringFunction::Pinball { alpha: 0.25 }] {
        for (i, q) in scenarios.iter().enumerate() {
            println!("{s:?} under scenario {i}: {}", elicit(&s, &x, q)?);
        }
        let w = elicit_worst_case(&s, &x, &scenarios, None)?;
        println!(
            "  envelope minimizer gives {:.4}, worst single value {:.4}, agrees = {}",
            w.value, w.max_single, w.agrees
        );
    }
    Ok(())
}
