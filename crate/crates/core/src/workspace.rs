//! Scenario CSV and spec-file ingestion.
//!
//! The CSV has a header row `outcome_id, base_prob, <scenario>..., pos:<name>...`.
//! The base column is exposed as the scenario `base`. The specs file is a
//! JSON object with optional `measures` and `combinations` maps:
//!
//! ```json
//! {
//!   "measures": { "es50": {"kind": "ES", "alpha": 0.5} },
//!   "combinations": { "mix": {"kind": "Mixture", "weights": [0.5, 0.5]} }
//! }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::Value;

use crate::combinators::CombinationSpec;
use crate::error::{Error, Result};
use crate::measures::RiskMeasureSpec;
use crate::prob::{FiniteProbSpace, Position, ScenarioMeasure};

/// Name under which the `base_prob` column is exposed.
pub const BASE_SCENARIO: &str = "base";

const POSITION_PREFIX: &str = "pos:";
const RENORMALIZE_TOL: f64 = 1e-9;
const EXACT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub space: FiniteProbSpace,
    pub scenarios: BTreeMap<String, ScenarioMeasure>,
    pub positions: BTreeMap<String, Position>,
    pub measures: BTreeMap<String, RiskMeasureSpec>,
    pub combinations: BTreeMap<String, CombinationSpec>,
    /// Scenario column order as in the CSV, `base` first.
    pub scenario_order: Vec<String>,
    /// Position column order as in the CSV.
    pub position_order: Vec<String>,
    /// Non-fatal findings such as renormalized columns.
    pub warnings: Vec<String>,
}

impl Workspace {
    pub fn scenario(&self, name: &str) -> Result<&ScenarioMeasure> {
        self.scenarios
            .get(name)
            .ok_or_else(|| Error::data("workspace", format!("unknown scenario `{name}`")))
    }

    pub fn position(&self, name: &str) -> Result<&Position> {
        self.positions
            .get(name)
            .ok_or_else(|| Error::data("workspace", format!("unknown position `{name}`")))
    }

    /// A named measure from the specs file, else the shorthand `ES:0.5` form.
    pub fn measure(&self, name: &str) -> Result<RiskMeasureSpec> {
        if let Some(spec) = self.measures.get(name) {
            return Ok(spec.clone());
        }
        name.parse()
            .map_err(|e: Error| Error::data(format!("measure `{name}`"), e.to_string()))
    }

    /// A named combination, `WorstCase`, inline JSON, or a path to a JSON file.
    pub fn combination(&self, name: &str) -> Result<CombinationSpec> {
        if let Some(spec) = self.combinations.get(name) {
            return Ok(spec.clone());
        }
        let trimmed = name.trim();
        if trimmed.eq_ignore_ascii_case("worstcase") || trimmed.eq_ignore_ascii_case("wc") {
            return Ok(CombinationSpec::WorstCase);
        }
        let (text, location) = if trimmed.starts_with('{') {
            (trimmed.to_string(), "inline combination".to_string())
        } else {
            let text = fs::read_to_string(trimmed).map_err(|e| {
                Error::data(
                    format!("combination `{name}`"),
                    format!("not a workspace name and not a readable file: {e}"),
                )
            })?;
            (text, trimmed.to_string())
        };
        let value: Value = serde_json::from_str(&text).map_err(|e| json_error(&location, &e))?;
        entry(&location, value)
    }

    /// Position names in CSV order.
    pub fn position_names(&self) -> &[String] {
        &self.position_order
    }

    pub fn outcomes(&self) -> usize {
        self.space.len()
    }
}

fn json_error(location: &str, e: &serde_json::Error) -> Error {
    Error::data(
        format!("{location}:{}:{}", e.line(), e.column()),
        e.to_string(),
    )
}

fn entry<T: DeserializeOwned>(location: &str, value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| Error::data(location, e.to_string()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecsFile {
    #[serde(default)]
    measures: BTreeMap<String, Value>,
    #[serde(default)]
    combinations: BTreeMap<String, Value>,
}

type NamedSpecs = (BTreeMap<String, RiskMeasureSpec>, BTreeMap<String, CombinationSpec>);

/// Parses a specs document; `origin` labels diagnostics.
pub fn parse_specs(text: &str, origin: &str) -> Result<NamedSpecs> {
    let file: SpecsFile = serde_json::from_str(text).map_err(|e| json_error(origin, &e))?;
    let measures = file
        .measures
        .into_iter()
        .map(|(name, v)| Ok((name.clone(), entry(&format!("{origin}: measures.{name}"), v)?)))
        .collect::<Result<_>>()?;
    let combinations = file
        .combinations
        .into_iter()
        .map(|(name, v)| Ok((name.clone(), entry(&format!("{origin}: combinations.{name}"), v)?)))
        .collect::<Result<_>>()?;
    Ok((measures, combinations))
}

/// Renormalizes a column whose sum is within `1e-9` of one; rejects the rest.
fn normalize(column: &str, origin: &str, probs: &mut [f64], warnings: &mut Vec<String>) -> Result<()> {
    let total: f64 = probs.iter().sum();
    let deviation = (total - 1.0).abs();
    if deviation > RENORMALIZE_TOL {
        return Err(Error::data(
            format!("{origin}: column `{column}`"),
            format!("probabilities sum to {total}, not 1"),
        ));
    }
    if deviation > EXACT_TOL {
        probs.iter_mut().for_each(|p| *p /= total);
        warnings.push(format!(
            "{origin}: column `{column}` summed to {total}; renormalized"
        ));
    }
    Ok(())
}

/// Parses the scenario CSV; `origin` labels diagnostics.
pub fn parse_csv(text: &str, origin: &str) -> Result<Workspace> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::data(format!("{origin}: header"), e.to_string()))?
        .clone();
    let columns: Vec<&str> = header.iter().collect();
    if columns.len() < 2 || columns[0] != "outcome_id" || columns[1] != "base_prob" {
        return Err(Error::data(
            format!("{origin}: header"),
            "first two columns must be `outcome_id,base_prob`",
        ));
    }

    let mut scenario_cols = Vec::new();
    let mut position_cols = Vec::new();
    let mut seen = BTreeMap::new();
    for (j, name) in columns.iter().enumerate().skip(2) {
        let (label, target) = match name.strip_prefix(POSITION_PREFIX) {
            Some(p) => (format!("{POSITION_PREFIX}{p}"), &mut position_cols),
            None => (name.to_string(), &mut scenario_cols),
        };
        let bare = label.trim_start_matches(POSITION_PREFIX);
        if bare.is_empty() {
            return Err(Error::data(format!("{origin}: header field {}", j + 1), "empty column name"));
        }
        if label == BASE_SCENARIO {
            return Err(Error::data(
                format!("{origin}: header field {}", j + 1),
                format!("`{BASE_SCENARIO}` is reserved for the base_prob column"),
            ));
        }
        if seen.insert(label.clone(), j).is_some() {
            return Err(Error::data(
                format!("{origin}: header field {}", j + 1),
                format!("duplicate column `{label}`"),
            ));
        }
        target.push((j, bare.to_string()));
    }

    let mut ids: Vec<String> = Vec::new();
    let mut base = Vec::new();
    let mut scen: Vec<Vec<f64>> = vec![Vec::new(); scenario_cols.len()];
    let mut pos: Vec<Vec<f64>> = vec![Vec::new(); position_cols.len()];
    for (r, record) in reader.records().enumerate() {
        let row = r + 2;
        let record = record.map_err(|e| Error::data(format!("{origin}: row {row}"), e.to_string()))?;
        if record.len() != columns.len() {
            return Err(Error::data(
                format!("{origin}: row {row}"),
                format!("expected {} fields, found {}", columns.len(), record.len()),
            ));
        }
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(Error::data(format!("{origin}: row {row}, field outcome_id"), "empty outcome id"));
        }
        if ids.contains(&id) {
            return Err(Error::data(
                format!("{origin}: row {row}, field outcome_id"),
                format!("duplicate outcome id `{id}`"),
            ));
        }
        ids.push(id);
        let number = |j: usize| -> Result<f64> {
            let field = &record[j];
            let v: f64 = field.parse().map_err(|_| {
                Error::data(
                    format!("{origin}: row {row}, field {}", columns[j]),
                    format!("`{field}` is not a number"),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::data(
                    format!("{origin}: row {row}, field {}", columns[j]),
                    "value is not finite",
                ));
            }
            Ok(v)
        };
        let probability = |j: usize| -> Result<f64> {
            let v = number(j)?;
            if v < 0.0 {
                return Err(Error::data(
                    format!("{origin}: row {row}, field {}", columns[j]),
                    format!("negative probability {v}"),
                ));
            }
            Ok(v)
        };
        base.push(probability(1)?);
        for (c, (j, _)) in scenario_cols.iter().enumerate() {
            scen[c].push(probability(*j)?);
        }
        for (c, (j, _)) in position_cols.iter().enumerate() {
            pos[c].push(number(*j)?);
        }
    }
    if ids.is_empty() {
        return Err(Error::data(origin, "no outcome rows"));
    }

    let mut warnings = Vec::new();
    normalize("base_prob", origin, &mut base, &mut warnings)?;
    let space = FiniteProbSpace::new(ids, base)
        .map_err(|e| Error::data(format!("{origin}: column base_prob"), e.to_string()))?;

    let mut scenarios = BTreeMap::new();
    let mut scenario_order = vec![BASE_SCENARIO.to_string()];
    scenarios.insert(BASE_SCENARIO.to_string(), space.base().clone());
    for ((_, name), mut probs) in scenario_cols.into_iter().zip(scen) {
        normalize(&name, origin, &mut probs, &mut warnings)?;
        let q = space
            .scenario(probs)
            .map_err(|e| Error::data(format!("{origin}: column `{name}`"), e.to_string()))?;
        scenario_order.push(name.clone());
        scenarios.insert(name, q);
    }
    let mut positions = BTreeMap::new();
    let mut position_order = Vec::new();
    for ((_, name), values) in position_cols.into_iter().zip(pos) {
        positions.insert(name.clone(), Position::new(values)?);
        position_order.push(name);
    }
    Ok(Workspace {
        space,
        scenarios,
        positions,
        measures: BTreeMap::new(),
        combinations: BTreeMap::new(),
        scenario_order,
        position_order,
        warnings,
    })
}

/// Loads the scenario CSV and, when given, the specs file.
pub fn load_workspace(csv_path: &Path, specs_path: Option<&Path>) -> Result<Workspace> {
    let origin = csv_path.display().to_string();
    let text = fs::read_to_string(csv_path).map_err(|e| Error::data(&origin, e.to_string()))?;
    let mut ws = parse_csv(&text, &origin)?;
    if let Some(path) = specs_path {
        let origin = path.display().to_string();
        let text = fs::read_to_string(path).map_err(|e| Error::data(&origin, e.to_string()))?;
        let (measures, combinations) = parse_specs(&text, &origin)?;
        ws.measures = measures;
        ws.combinations = combinations;
    }
    Ok(ws)
}
