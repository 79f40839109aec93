//! Command-line front end. Every subcommand reads a workspace, builds a
//! [`Document`] and writes it as a table or as structured JSON.
//!
//! Exit codes: 0 when every check passed, 1 when a check failed (the
//! document carries a witness), 2 on usage or data errors.

use std::ffi::OsString;
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::combinators::{
    check_f_axiom, check_rho_axiom, combine, lipschitz_check, CheckConfig, CombinationSpec, ComposedMeasure, FAxiom,
    RhoAxiom,
};
use crate::duality::composed_dual_check;
use crate::elicit::{elicit_worst_case, ScoringFunction};
use crate::error::{Error, Result};
use crate::kusuoka::law_invariant_composed_check;
use crate::measures::{evaluate, RiskFamily, RiskMeasureSpec};
use crate::orders::{dominates, OrderKind};
use crate::prob::ScenarioMeasure;
use crate::report::{Document, Status};
use crate::suite::{self, SuiteOptions};
use crate::workspace::{load_workspace, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Structured,
}

#[derive(Debug, Parser)]
#[command(name = "risk-compose", version, about = "Evaluate and verify composed risk measures on finite scenario spaces")]
pub struct RunConfig {
    /// Scenario CSV: outcome_id, base_prob, <scenario>..., pos:<name>...
    #[arg(long, global = true)]
    pub workspace: Option<PathBuf>,
    /// JSON file with named measures and combinations.
    #[arg(long, global = true)]
    pub specs: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the command's comparison tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the document here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct FamilyArgs {
    /// Measure names from the specs file or shorthands such as ES:0.5.
    #[arg(long = "measures", alias = "measure", value_delimiter = ',', required = true)]
    pub measures: Vec<String>,
    /// Scenario names; `all` for every column.
    #[arg(long = "scenarios", alias = "scenario", value_delimiter = ',', default_value = "base")]
    pub scenarios: Vec<String>,
}

#[derive(Debug, Args)]
pub struct PositionArgs {
    /// Position names; `all` for every position column.
    #[arg(long = "positions", alias = "position", value_delimiter = ',', default_value = "all")]
    pub positions: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate base measures on positions under scenarios.
    Eval {
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        positions: PositionArgs,
    },
    /// Risk profile and combined value.
    Combine {
        /// Combination name, WorstCase, inline JSON or a JSON file.
        #[arg(long)]
        combine: String,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        positions: PositionArgs,
    },
    /// Composed value against the dual LP optimum.
    DualCheck {
        #[arg(long)]
        combine: String,
        #[command(flatten)]
        family: FamilyArgs,
        #[command(flatten)]
        positions: PositionArgs,
    },
    /// Randomized axiom checks for the combination and the composed measure.
    Axioms {
        #[arg(long)]
        combine: String,
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
    },
    /// Stochastic dominance of one position over another.
    Dominance {
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// `1`, `2`, `1,Q`, `2,I`.
        #[arg(long, default_value = "2,I")]
        order: String,
        #[arg(long = "scenarios", alias = "scenario", value_delimiter = ',', default_value = "all")]
        scenarios: Vec<String>,
    },
    /// Per-scenario and worst-case elicitation.
    Elicit {
        /// `squared` or `pinball:<alpha>`.
        #[arg(long)]
        scoring: String,
        #[arg(long)]
        position: String,
        #[arg(long = "scenarios", alias = "scenario", value_delimiter = ',', default_value = "all")]
        scenarios: Vec<String>,
        #[arg(long)]
        resolution: Option<f64>,
    },
    /// ES-mixture representation of a composed law-invariant measure.
    KusuokaCheck {
        #[arg(long)]
        combine: String,
        #[arg(long)]
        measure: String,
        #[arg(long = "scenarios", alias = "scenario", value_delimiter = ',', default_value = "all")]
        scenarios: Vec<String>,
        #[command(flatten)]
        positions: PositionArgs,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.25,0.5,0.75,1")]
        grid: Vec<f64>,
    },
    /// The full acceptance suite.
    Report {
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 200)]
        instances: usize,
    },
}

/// Parses arguments, runs the command, writes the document and returns the
/// exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&config) {
        Ok(doc) => {
            for w in &doc.warnings {
                eprintln!("warning: {w}");
            }
            let text = match config.format {
                Format::Table => doc.to_table(),
                Format::Structured => doc.to_structured(),
            };
            match &config.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, text) {
                        eprintln!("error: {}: {e}", path.display());
                        return 2;
                    }
                }
                None => print!("{text}"),
            }
            doc.status.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

/// Runs the configured command.
pub fn execute(config: &RunConfig) -> Result<Document> {
    let path = config
        .workspace
        .as_deref()
        .ok_or_else(|| Error::Domain("--workspace is required".into()))?;
    let ws = load_workspace(path, config.specs.as_deref())?;
    let mut doc = match &config.command {
        Command::Eval { family, positions } => eval(&ws, family, positions)?,
        Command::Combine {
            combine,
            family,
            positions,
        } => combine_cmd(&ws, combine, family, positions)?,
        Command::DualCheck {
            combine,
            family,
            positions,
        } => dual_check(&ws, combine, family, positions, config.tol.unwrap_or(1e-8))?,
        Command::Axioms {
            combine,
            family,
            trials,
        } => axioms(&ws, combine, family, config, *trials)?,
        Command::Dominance { x, y, order, scenarios } => dominance(&ws, x, y, order, scenarios)?,
        Command::Elicit {
            scoring,
            position,
            scenarios,
            resolution,
        } => elicit_cmd(&ws, scoring, position, scenarios, *resolution)?,
        Command::KusuokaCheck {
            combine,
            measure,
            scenarios,
            positions,
            grid,
        } => kusuoka(&ws, combine, measure, scenarios, positions, grid, config.tol.unwrap_or(1e-8))?,
        Command::Report { trials, instances } => report(&ws, config, *trials, *instances),
    };
    doc.warnings = ws.warnings.clone();
    Ok(doc)
}

fn scenario_names(ws: &Workspace, names: &[String]) -> Vec<String> {
    if names.iter().any(|n| n == "all") {
        ws.scenario_order.clone()
    } else {
        names.to_vec()
    }
}

fn scenarios(ws: &Workspace, names: &[String]) -> Result<Vec<(String, ScenarioMeasure)>> {
    scenario_names(ws, names)
        .into_iter()
        .map(|n| Ok((n.clone(), ws.scenario(&n)?.clone())))
        .collect()
}

fn position_names(ws: &Workspace, args: &PositionArgs) -> Result<Vec<String>> {
    let names = if args.positions.iter().any(|n| n == "all") {
        ws.position_order.clone()
    } else {
        args.positions.clone()
    };
    for n in &names {
        ws.position(n)?;
    }
    if names.is_empty() {
        return Err(Error::Domain("the workspace has no positions".into()));
    }
    Ok(names)
}

fn family(ws: &Workspace, args: &FamilyArgs) -> Result<(RiskFamily, Vec<String>)> {
    let specs = args
        .measures
        .iter()
        .map(|m| ws.measure(m))
        .collect::<Result<Vec<_>>>()?;
    let named = scenarios(ws, &args.scenarios)?;
    let qs: Vec<ScenarioMeasure> = named.iter().map(|(_, q)| q.clone()).collect();
    let family = RiskFamily::broadcast(&specs, &qs)?;
    let labels = if specs.len() == 1 {
        named.iter().map(|(n, _)| format!("{}@{}", specs[0].label(), n)).collect()
    } else if named.len() == 1 {
        specs.iter().map(|s| format!("{}@{}", s.label(), named[0].0)).collect()
    } else {
        specs
            .iter()
            .zip(&named)
            .map(|(s, (n, _))| format!("{}@{}", s.label(), n))
            .collect()
    };
    Ok((family, labels))
}

fn eval(ws: &Workspace, args: &FamilyArgs, positions: &PositionArgs) -> Result<Document> {
    let mut doc = Document::new("eval", &["position", "scenario", "measure", "value"]);
    let specs = args
        .measures
        .iter()
        .map(|m| ws.measure(m))
        .collect::<Result<Vec<_>>>()?;
    let named = scenarios(ws, &args.scenarios)?;
    for p in position_names(ws, positions)? {
        let x = ws.position(&p)?;
        for (s, q) in &named {
            for spec in &specs {
                let v = evaluate(spec, x, q)?;
                doc.push(json!({
                    "position": p,
                    "scenario": s,
                    "measure": spec.label(),
                    "value": v.value,
                    "tail_within_first_atom": v.tail_within_first_atom,
                }));
            }
        }
    }
    Ok(doc)
}

fn composed(ws: &Workspace, combine: &str, args: &FamilyArgs) -> Result<(ComposedMeasure, Vec<String>)> {
    let f: CombinationSpec = ws.combination(combine)?;
    let (family, labels) = family(ws, args)?;
    Ok((ComposedMeasure::new(f, family)?, labels))
}

fn combine_cmd(ws: &Workspace, combine_name: &str, args: &FamilyArgs, positions: &PositionArgs) -> Result<Document> {
    let (rho, labels) = composed(ws, combine_name, args)?;
    let mut doc = Document::new("combine", &["position", "combination", "profile", "value"]);
    for p in position_names(ws, positions)? {
        let x = ws.position(&p)?;
        let profile = rho.family().profile(x)?;
        let value = combine(rho.combination(), &profile)?;
        doc.push(json!({
            "position": p,
            "combination": rho.combination().label(),
            "members": labels,
            "profile": profile.entries(),
            "value": value,
        }));
    }
    Ok(doc)
}

fn dual_check(
    ws: &Workspace,
    combine_name: &str,
    args: &FamilyArgs,
    positions: &PositionArgs,
    tol: f64,
) -> Result<Document> {
    let (rho, _) = composed(ws, combine_name, args)?;
    let mut doc = Document::new("dual-check", &["position", "lhs", "rhs", "gap", "passed"]);
    for p in position_names(ws, positions)? {
        let x = ws.position(&p)?;
        let r = composed_dual_check(rho.combination(), rho.family(), x, tol)?;
        let mut row = json!(r);
        row["position"] = json!(p);
        if !r.passed {
            row["witness"] = json!({"position": p, "X": x.values(), "lhs": r.lhs, "rhs": r.rhs});
        }
        doc.push(row);
    }
    Ok(doc)
}

fn axioms(ws: &Workspace, combine_name: &str, args: &FamilyArgs, config: &RunConfig, trials: usize) -> Result<Document> {
    let (rho, _) = composed(ws, combine_name, args)?;
    let check = CheckConfig {
        trials,
        seed: config.seed,
        tol: config.tol.unwrap_or(CheckConfig::default().tol),
        ..CheckConfig::default()
    };
    let mut doc = Document::new("axioms", &["target", "axiom", "expected", "trials", "found_violation", "passed"]);
    let m = rho.family().len();
    let row = |target: &str, axiom: String, expected: bool, trials: usize, violated: bool, witness: Option<Value>| {
        json!({
            "target": target,
            "axiom": axiom,
            "expected": expected,
            "trials": trials,
            "found_violation": violated,
            "passed": !(expected && violated),
            "witness": witness,
        })
    };
    for axiom in FAxiom::ALL {
        let r = check_f_axiom(rho.combination(), m, axiom, &check)?;
        doc.push(row("f", format!("{axiom:?}"), r.expected, r.trials, !r.passed, r.witness.map(|w| json!(w))));
    }
    for axiom in RhoAxiom::ALL {
        let r = check_rho_axiom(&rho, axiom, &check);
        let expected = axiom.inherited(&rho);
        doc.push(row("rho", format!("{axiom:?}"), expected, r.trials, !r.passed, r.witness.map(|w| json!(w))));
    }
    let lip = lipschitz_check(&rho, &check);
    let monotone_ti = rho.combination().properties().monotone && rho.combination().properties().translation_invariant;
    doc.push(row(
        "rho",
        "Lipschitz".into(),
        monotone_ti,
        lip.trials,
        !lip.passed,
        lip.witness.map(|w| json!(w)),
    ));
    doc.details = json!({"subject": rho.label(), "seed": config.seed});
    Ok(doc)
}

fn dominance(ws: &Workspace, x: &str, y: &str, order: &str, names: &[String]) -> Result<Document> {
    let kind: OrderKind = order.parse()?;
    let named = scenarios(ws, names)?;
    let qs: Vec<ScenarioMeasure> = named.iter().map(|(_, q)| q.clone()).collect();
    let r = dominates(ws.position(x)?, ws.position(y)?, kind, &qs)?;
    let mut doc = Document::new("dominance", &["x", "y", "order", "holds", "witness_level", "witness_scenario"]);
    let scenario = r.witness_scenario.map(|i| named[i].0.clone());
    doc.push(json!({
        "x": x,
        "y": y,
        "order": kind.to_string(),
        "scenarios": named.iter().map(|(n, _)| n).collect::<Vec<_>>(),
        "holds": r.holds,
        "passed": r.holds,
        "witness_level": r.witness_level,
        "witness_scenario": scenario,
        "witness": (!r.holds).then(|| json!({"level": r.witness_level, "scenario": scenario})),
    }));
    Ok(doc)
}

fn elicit_cmd(
    ws: &Workspace,
    scoring: &str,
    position: &str,
    names: &[String],
    resolution: Option<f64>,
) -> Result<Document> {
    let s: ScoringFunction = scoring.parse()?;
    let x = ws.position(position)?;
    let named = scenarios(ws, names)?;
    let qs: Vec<ScenarioMeasure> = named.iter().map(|(_, q)| q.clone()).collect();
    let r = elicit_worst_case(&s, x, &qs, resolution)?;
    let mut doc = Document::new("elicit", &["scenario", "elicited", "passed"]);
    for ((n, _), v) in named.iter().zip(&r.per_scenario) {
        doc.push(json!({"scenario": n, "elicited": v}));
    }
    let witness = (!r.agrees).then(|| {
        json!({"X": x.values(), "envelope_value": r.value, "max_single": r.max_single, "resolution": r.resolution})
    });
    doc.push(json!({
        "scenario": "worst-case envelope",
        "elicited": r.value,
        "max_single": r.max_single,
        "argmin": r.argmin,
        "active_scenario": named[r.active_scenario].0,
        "resolution": r.resolution,
        "passed": r.agrees,
        "witness": witness,
    }));
    doc.details = json!({"scoring": s.to_string(), "position": position});
    Ok(doc)
}

fn kusuoka(
    ws: &Workspace,
    combine_name: &str,
    measure: &str,
    names: &[String],
    positions: &PositionArgs,
    grid: &[f64],
    tol: f64,
) -> Result<Document> {
    let f = ws.combination(combine_name)?;
    let spec: RiskMeasureSpec = ws.measure(measure)?;
    let qs: Vec<ScenarioMeasure> = scenarios(ws, names)?.into_iter().map(|(_, q)| q).collect();
    let mut doc = Document::new("kusuoka-check", &["position", "lhs", "rhs", "gap", "equality_asserted", "passed"]);
    for p in position_names(ws, positions)? {
        let x = ws.position(&p)?;
        let r = law_invariant_composed_check(&f, &spec, &qs, x, grid, tol)?;
        let mut row = json!(r);
        row["position"] = json!(p);
        if !r.passed {
            row["witness"] = json!({"X": x.values(), "lhs": r.lhs, "rhs": r.rhs});
        }
        doc.push(row);
    }
    Ok(doc)
}

fn report(ws: &Workspace, config: &RunConfig, trials: usize, instances: usize) -> Document {
    let opts = SuiteOptions {
        seed: config.seed,
        tol: config.tol.unwrap_or(SuiteOptions::default().tol),
        trials,
        instances,
    };
    let suite = suite::run(ws, &opts);
    let mut doc = Document::new("report", &["criterion", "title", "checks", "passed"]);
    for c in &suite.criteria {
        let failed: Vec<&str> = c.checks.iter().filter(|s| !s.passed).map(|s| s.name.as_str()).collect();
        doc.push(json!({
            "criterion": c.id,
            "title": c.title,
            "checks": c.checks.len(),
            "passed": c.passed,
            "failed_checks": failed,
            "witness": c.checks.iter().find(|s| !s.passed).and_then(|s| s.witness.clone()),
        }));
    }
    doc.status = Status::from_passed(suite.passed);
    doc.details = json!(suite);
    doc
}
