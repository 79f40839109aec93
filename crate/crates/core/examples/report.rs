//! Loads the bundled workspace and runs the full verification suite.
//!
//! cargo run --release --example report

use std::path::PathBuf;

use risk_compose::suite::{self, SuiteOptions};
use risk_compose::workspace::load_workspace;

fn main() -> risk_compose::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data");
    let ws = load_workspace(&dir.join("canonical.csv"), Some(&dir.join("specs.json")))?;
    println!("positions {:?}, scenarios {:?}", ws.position_names(), ws.scenario_order);
    let report = suite::run(&ws, &SuiteOptions { trials: 2000, instances: 50, ..SuiteOptions::default() });
    for c in &report.criteria {
        println!("{}", c.summary_line());
    }
    Ok(())
}
