//! Output documents. Every command builds a [`Document`]; the table view is
//! rendered from its serialized form so both views carry the same numbers.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl Status {
    pub fn from_passed(passed: bool) -> Self {
        if passed {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }
}

pub type Row = BTreeMap<String, Value>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub command: String,
    pub status: Status,
    /// Row keys shown in the table view, in order.
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
    #[serde(skip_serializing_if = "Value::is_null", default)]
    pub details: Value,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub warnings: Vec<String>,
}

impl Document {
    pub fn new(command: &str, columns: &[&str]) -> Self {
        Self {
            command: command.into(),
            status: Status::Pass,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            details: Value::Null,
            warnings: Vec::new(),
        }
    }

    /// Adds a row; a row with `"passed": false` fails the document.
    pub fn push(&mut self, row: Value) {
        let Value::Object(map) = row else {
            panic!("rows are JSON objects");
        };
        if map.get("passed") == Some(&Value::Bool(false)) {
            self.status = Status::Fail;
        }
        self.rows.push(map.into_iter().collect());
    }

    pub fn fail(&mut self) {
        self.status = Status::Fail;
    }

    pub fn to_structured(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn to_table(&self) -> String {
        render_table(&serde_json::to_value(self).expect("documents serialize"))
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => "-".into(),
        Some(Value::String(s)) => s.clone(),
        Some(Value::Number(n)) => n.to_string(),
        Some(Value::Bool(b)) => b.to_string(),
        Some(other) => other.to_string(),
    }
}

/// Renders a serialized [`Document`] as an aligned text table followed by
/// the status, warnings and any witnesses.
pub fn render_table(doc: &Value) -> String {
    let columns: Vec<String> = doc["columns"]
        .as_array()
        .map(|c| c.iter().map(|v| cell(Some(v))).collect())
        .unwrap_or_default();
    let rows = doc["rows"].as_array().cloned().unwrap_or_default();
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| columns.iter().map(|c| cell(r.get(c))).collect())
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(j, c)| cells.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();

    let mut out = String::new();
    let line = |out: &mut String, items: &[String]| {
        let padded: Vec<String> = items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect();
        let _ = writeln!(out, "{}", padded.join("  ").trim_end());
    };
    line(&mut out, &columns);
    line(
        &mut out,
        &widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>(),
    );
    for r in &cells {
        line(&mut out, r);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "{}: {}", cell(doc.get("command")), cell(doc.get("status")));
    if let Some(warnings) = doc["warnings"].as_array() {
        for w in warnings {
            let _ = writeln!(out, "warning: {}", cell(Some(w)));
        }
    }
    for (i, r) in rows.iter().enumerate() {
        if let Some(w) = r.get("witness").filter(|w| !w.is_null()) {
            let _ = writeln!(out, "witness (row {}): {}", i + 1, w);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn failing_row_fails_document() {
        let mut doc = Document::new("t", &["a", "passed"]);
        doc.push(json!({"a": 1.5, "passed": true}));
        assert_eq!(doc.status, Status::Pass);
        doc.push(json!({"a": 2, "passed": false, "witness": {"X": [1, 2]}}));
        assert_eq!(doc.status, Status::Fail);
        let table = doc.to_table();
        assert!(table.contains("t: fail"));
        assert!(table.contains("witness (row 2)"));
    }

    #[test]
    fn structured_is_stable() {
        let mut doc = Document::new("t", &["b"]);
        doc.push(json!({"z": 1, "b": 2}));
        let s = doc.to_structured();
        assert!(s.find("\"b\"").unwrap() < s.find("\"z\"").unwrap());
        assert_eq!(s, doc.clone().to_structured());
    }
}
