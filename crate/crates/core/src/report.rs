//! Report assembly. A report is one JSON object with a `meta` block (tool,
//! version, command, config echo, tolerances, seed) and a `results` array.
//! Keys in the echo are kept sorted and numbers are printed in shortest
//! round-trip form, so equal inputs give equal bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{GeomError, Result};
use crate::revolution::{EuclidSample, GluedSample};
use crate::suite::SuiteResult;

pub const TOOL: &str = "curv";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: BTreeMap<String, String>,
    pub tolerances: BTreeMap<String, f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub results: Vec<Value>,
}

impl Report {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        Self {
            meta: Meta {
                tool: TOOL,
                version: VERSION,
                command: command.into(),
                config: BTreeMap::new(),
                tolerances: BTreeMap::new(),
                seed,
            },
            results: Vec::new(),
        }
    }

    pub fn config(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.meta.config.insert(key.into(), value.to_string());
        self
    }

    pub fn tolerance(mut self, key: impl Into<String>, value: f64) -> Self {
        self.meta.tolerances.insert(key.into(), value);
        self
    }

    pub fn push<T: Serialize>(&mut self, item: &T) -> Result<()> {
        let v = serde_json::to_value(item).map_err(|e| GeomError::Parse(e.to_string()))?;
        self.results.push(v);
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| GeomError::Parse(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Writes `text` to `path`, creating parent directories.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// Header row, then one line per row. Cells are written verbatim, so callers
/// format numbers with `Display` (`.` decimal, no grouping).
pub fn csv_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = header.join(",");
    s.push('\n');
    for r in rows {
        s.push_str(&r.join(","));
        s.push('\n');
    }
    s
}

pub fn checks_csv(results: &[SuiteResult]) -> String {
    let mut rows = Vec::new();
    for r in results {
        for c in &r.checks {
            let relation = serde_json::to_value(c.relation).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            rows.push(vec![r.suite.clone(), quote(&c.name), relation, num(c.value), num(c.limit), c.pass.to_string()]);
        }
    }
    csv_table(&["suite", "check", "relation", "value", "limit", "pass"], &rows)
}

pub fn glued_csv(samples: &[GluedSample]) -> String {
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| {
            vec![s.piece.to_string(), num(s.r), num(s.value), num(s.lambda1), num(s.lambda2), num(s.scalar)]
        })
        .collect();
    csv_table(&["piece", "r", "value", "lambda1", "lambda2", "R"], &rows)
}

pub fn euclid_csv(samples: &[EuclidSample]) -> String {
    let rows: Vec<Vec<String>> = samples
        .iter()
        .map(|s| vec![num(s.z), num(s.f), num(s.gauss), num(s.scalar)])
        .collect();
    csv_table(&["z", "f", "K", "R"], &rows)
}

/// Quotes a cell when it contains a separator or quote.
pub fn quote(cell: &str) -> String {
    if cell.contains([',', '"', '\n']) {
        let mut s = String::with_capacity(cell.len() + 2);
        s.push('"');
        for ch in cell.chars() {
            if ch == '"' {
                s.push('"');
            }
            s.push(ch);
        }
        s.push('"');
        s
    } else {
        cell.to_owned()
    }
}

/// Joins numbers with `;` for list-valued CSV cells.
/// Shortest round-trip text for a number, with an exponent for very small or
/// very large magnitudes.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn join_numbers(v: &[f64]) -> String {
    let mut s = String::new();
    for (i, x) in v.iter().enumerate() {
        if i > 0 {
            s.push(';');
        }
        let _ = write!(s, "{x:?}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut r = Report::new("verify identity", 7).config("n", 4).tolerance("identity", 1e-10);
        r.push(&serde_json::json!({"x": 1.5})).unwrap();
        let s = r.to_json().unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["meta"]["seed"], 7);
        assert_eq!(v["meta"]["tool"], "curv");
        assert_eq!(v["meta"]["config"]["n"], "4");
        assert_eq!(v["results"][0]["x"], 1.5);
        assert_eq!(s, r.to_json().unwrap());
    }

    #[test]
    fn csv_cells() {
        assert_eq!(quote("a,b"), "\"a,b\"");
        assert_eq!(quote("say \"hi\""), "\"say \"\"hi\"\"\"");
        assert_eq!(join_numbers(&[0.5, -1.0]), "0.5;-1.0");
        assert_eq!(num(1e-20), "1e-20");
        assert_eq!(csv_table(&["a", "b"], &[vec!["1".into(), "2".into()]]), "a,b\n1,2\n");
    }
}
