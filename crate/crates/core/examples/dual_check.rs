//! Primal value against the dual supremum, with the certificate measure.

use risk_compose::combinators::{CombinationSpec, IndexWeight};
use risk_compose::duality::{composed_dual_check, dual_evaluate, worst_case_penalty_check};
use risk_compose::measures::{RiskFamily, RiskMeasureSpec};
use risk_compose::prob::{Position, ScenarioMeasure};

fn main() -> risk_compose::Result<()> {
    let x = Position::new(vec![-10.0, -5.0, 0.0, 5.0])?;
    let p = ScenarioMeasure::uniform(4)?;

    let es = RiskMeasureSpec::ExpectedShortfall(0.5);
    let d = dual_evaluate(&es, &x, &p)?;
    println!("{}: {} attained at Q = {:?}", es.label(), d.value, d.certificate.probs());

    let family = RiskFamily::broadcast(
        &[RiskMeasureSpec::ExpectedShortfall(0.5), RiskMeasureSpec::ExpectedShortfall(0.25)],
        &[p],
    )?;
    let mix = CombinationSpec::Mixture(IndexWeight::new(vec![0.5, 0.5])?);
    let r = composed_dual_check(&mix, &family, &x, 1e-8)?;
    println!("{}: lhs {} rhs {} gap {:e}", r.combination, r.lhs, r.rhs, r.gap);
    for t in &r.penalty_trace {
        println!("  {} w={} Q={:?}", t.component, t.weight, t.scenario_q);
    }

    // A measure outside both dual sets that the worst case still admits.
    let q = ScenarioMeasure::new(vec![0.6, 0.4, 0.0, 0.0])?;
    let w = worst_case_penalty_check(&family, &q)?;
    println!("worst-case penalty at {:?}: {:?}, agree = {}", w.q, w.membership_inf, w.agree);
    Ok(())
}
