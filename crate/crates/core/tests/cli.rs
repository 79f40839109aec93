use std::fs;
use std::path::{Path, PathBuf};

use risk_compose::cli;
use serde_json::Value;
use tempfile::TempDir;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .display()
        .to_string()
}

fn run(args: &[&str]) -> i32 {
    cli::run(std::iter::once("risk-compose").chain(args.iter().copied()))
}

/// Runs with `--out` into `dir` and returns the exit code and the file text.
fn run_to(dir: &Path, file: &str, args: &[&str]) -> (i32, String) {
    let out = dir.join(file).display().to_string();
    let mut full = vec!["--out", out.as_str()];
    full.extend_from_slice(args);
    let code = run(&full);
    (code, fs::read_to_string(&out).unwrap_or_default())
}

fn canonical<'a>(rest: &[&'a str]) -> Vec<&'a str> {
    let ws: &'static str = Box::leak(data("canonical.csv").into_boxed_str());
    let specs: &'static str = Box::leak(data("specs.json").into_boxed_str());
    let mut v = vec!["--workspace", ws, "--specs", specs];
    v.extend_from_slice(rest);
    v
}

fn write_csv(dir: &Path, body: &str) -> String {
    let path = dir.join("ws.csv");
    fs::write(&path, body).unwrap();
    path.display().to_string()
}

#[test]
fn eval_reports_the_pinned_value() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "eval.json",
        &canonical(&["--format", "structured", "eval", "--measures", "ES:0.5", "--positions", "X"]),
    );
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["status"], "pass");
    assert_eq!(doc["rows"][0]["value"], 7.5);
    assert_eq!(doc["rows"][0]["scenario"], "base");
}

#[test]
fn named_measures_resolve_from_specs() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "eval.json",
        &canonical(&["--format", "structured", "eval", "--measures", "blend", "--positions", "X"]),
    );
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert!((doc["rows"][0]["value"].as_f64().unwrap() - 8.75).abs() < 1e-12);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(run(&canonical(&["eval", "--no-such-flag"])), 2);
    assert_eq!(run(&["eval", "--measures", "el"]), 2);
    assert_eq!(run(&canonical(&["eval", "--measures", "nonsense"])), 2);
    assert_eq!(run(&canonical(&["--format", "xml", "eval", "--measures", "el"])), 2);
}

#[test]
fn bad_mass_exits_2() {
    let dir = TempDir::new().unwrap();
    let ws = write_csv(dir.path(), "outcome_id,base_prob,pos:X\na,0.5,1\nb,0.4,2\n");
    assert_eq!(run(&["--workspace", &ws, "eval", "--measures", "el"]), 2);
}

#[test]
fn duplicate_outcome_exits_2() {
    let dir = TempDir::new().unwrap();
    let ws = write_csv(dir.path(), "outcome_id,base_prob,pos:X\na,0.5,1\na,0.5,2\n");
    assert_eq!(run(&["--workspace", &ws, "eval", "--measures", "el"]), 2);
}

#[test]
fn dual_check_from_file_passes() {
    let mix = data("mix.json");
    let args = canonical(&["dual-check", "--combine", &mix, "--measures", "ES:0.5,ES:0.25"]);
    let dir = TempDir::new().unwrap();
    let (code, text) = run_to(dir.path(), "dual.txt", &args);
    assert_eq!(code, 0);
    assert!(text.contains("dual-check: pass"));
}

#[test]
fn failing_dominance_exits_1_with_witness() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "dom.json",
        &canonical(&["--format", "structured", "dominance", "--x", "Y", "--y", "X", "--order", "1,I"]),
    );
    assert_eq!(code, 1);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["status"], "fail");
    assert_eq!(doc["rows"][0]["witness_level"], 1.0);
}

#[test]
fn axioms_accept_expected_violations() {
    let dir = TempDir::new().unwrap();
    let (code, text) = run_to(
        dir.path(),
        "ax.json",
        &canonical(&[
            "--format", "structured", "axioms", "--combine", "wc", "--measures", "var25", "--scenarios", "base,skewed",
            "--trials", "2000",
        ]),
    );
    assert_eq!(code, 0);
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert!(doc["rows"].as_array().unwrap().iter().all(|r| r["passed"] == true));
}

#[test]
fn structured_output_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = canonical(&[
        "--seed", "7", "--format", "structured", "axioms", "--combine", "mix", "--measures", "es50,es25", "--trials", "500",
    ]);
    let (a, first) = run_to(dir.path(), "a.json", &args);
    let (b, second) = run_to(dir.path(), "b.json", &args);
    assert_eq!((a, b), (0, 0));
    assert_eq!(first, second);
}

#[test]
fn table_and_structured_views_agree() {
    let dir = TempDir::new().unwrap();
    let rest = ["eval", "--measures", "el,es50,ml", "--scenarios", "base,skewed"];
    let mut structured = vec!["--format", "structured"];
    structured.extend_from_slice(&rest);
    let (_, json) = run_to(dir.path(), "s.json", &canonical(&structured));
    let (_, table) = run_to(dir.path(), "t.txt", &canonical(&rest));
    let doc: Value = serde_json::from_str(&json).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    let lines: Vec<&str> = table.lines().skip(2).take(rows.len()).collect();
    assert_eq!(lines.len(), rows.len());
    for (row, line) in rows.iter().zip(lines) {
        let cells: Vec<&str> = line.split_whitespace().collect();
        assert_eq!(cells[0], row["position"].as_str().unwrap());
        assert_eq!(cells[1], row["scenario"].as_str().unwrap());
        assert_eq!(cells[3].parse::<f64>().unwrap(), row["value"].as_f64().unwrap());
    }
}
