//! Base risk measures on a four-outcome position, in floats and exactly.

use risk_compose::kusuoka::Spectrum;
use risk_compose::measures::{evaluate, RiskMeasureSpec};
use risk_compose::prob::{Position, ScenarioMeasure};
use risk_compose::scalar::{ratio, Rational};

fn main() -> risk_compose::Result<()> {
    let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0])?;
    let p = ScenarioMeasure::uniform(4)?;
    let specs = [
        RiskMeasureSpec::ExpectedLoss,
        RiskMeasureSpec::ValueAtRisk(0.25),
        RiskMeasureSpec::ExpectedShortfall(0.5),
        RiskMeasureSpec::MaxLoss,
        RiskMeasureSpec::Spectral(Spectrum::new(vec![(0.0, 2.0), (0.5, 0.0)])?),
    ];
    for spec in &specs {
        println!("{:<28} {:>8}", spec.label(), evaluate(spec, &x, &p)?.value);
    }

    let skewed: ScenarioMeasure<Rational> =
        ScenarioMeasure::new(vec![ratio(2, 5), ratio(3, 10), ratio(1, 5), ratio(1, 10)])?;
    let es = RiskMeasureSpec::ExpectedShortfall(ratio(1, 3));
    println!("exact {} under skewed = {}", es.label(), evaluate(&es, &x.map_scalar(), &skewed)?.value);
    Ok(())
}
