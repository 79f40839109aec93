//! Spectra and their ES-mixture measures, and the composed check over an
//! alpha grid.

use risk_compose::combinators::{CombinationSpec, IndexWeight};
use risk_compose::kusuoka::{law_invariant_composed_check, m_from_phi, mixture_spectrum, phi_from_m, Spectrum};
use risk_compose::measures::RiskMeasureSpec;
use risk_compose::prob::{Position, ScenarioMeasure};
use risk_compose::scalar::{ratio, Rational};

fn pairs(v: &[(Rational, Rational)]) -> String {
    v.iter().map(|(a, b)| format!("({a}, {b})")).collect::<Vec<_>>().join(" ")
}

fn main() -> risk_compose::Result<()> {
    let phi = Spectrum::new(vec![(ratio(0, 1), ratio(3, 1)), (ratio(1, 4), ratio(1, 3))])?;
    let m = m_from_phi(&phi)?;
    println!("phi {}", pairs(phi.steps()));
    println!("m   {}", pairs(m.atoms()));
    assert_eq!(phi_from_m(&m), phi);

    let es = Spectrum::expected_shortfall(ratio(1, 2))?;
    let blend = mixture_spectrum(&[phi, es], &IndexWeight::new(vec![ratio(1, 2), ratio(1, 2)])?)?;
    println!("blend {}", pairs(blend.steps()));

    let scenarios = [ScenarioMeasure::uniform(4)?, ScenarioMeasure::new(vec![0.4, 0.3, 0.2, 0.1])?];
    let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0])?;
    let grid = [0.1, 0.25, 0.5, 0.75, 1.0];
    for f in [CombinationSpec::Mixture(IndexWeight::uniform(2)?), CombinationSpec::WorstCase] {
        let r = law_invariant_composed_check(&f, &RiskMeasureSpec::ExpectedShortfall(0.5), &scenarios, &x, &grid, 1e-9)?;
        println!("{}: lhs {} rhs {} passed {}", r.combination, r.lhs, r.rhs, r.passed);
    }
    Ok(())
}
