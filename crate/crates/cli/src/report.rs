//! JSON report encoding. Infinite values are written as the strings `"inf"`
//! and `"-inf"`; key order is fixed by construction.

use std::path::Path;

use anyhow::{Context, Result};
use serde_json::{json, Value};

use ldp_core::convex::{EntryFlag, GridFunction, Support};
use ldp_core::extreal;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Report {
    pub json: Value,
    /// `(table name, CSV text)` for each grid function.
    pub csv: Vec<(String, String)>,
}

impl Report {
    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.json).expect("report values are always serializable");
        s.push('\n');
        s
    }

    /// `report.json` plus one CSV per table.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("report.json"), self.to_pretty())?;
        for (name, text) in &self.csv {
            std::fs::write(dir.join(format!("{name}.csv")), text)?;
        }
        Ok(())
    }

    pub fn all_hold(&self) -> bool {
        self.json["verdict"]["all_hold"].as_bool().unwrap_or(false)
    }
}

pub fn encode(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else {
        json!(extreal::format(x))
    }
}

pub fn decode(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => extreal::parse(s),
        _ => None,
    }
}

fn flag_name(f: EntryFlag) -> &'static str {
    match f {
        EntryFlag::Exact => "exact",
        EntryFlag::NotConverged => "not-converged",
        EntryFlag::Divergent => "divergent",
        EntryFlag::Truncated => "truncated",
    }
}

pub fn grid_table(f: &GridFunction, window: &Value, tol: f64) -> Value {
    json!({
        "label": f.label(),
        "support": match f.support() { Support::Bounded => "bounded", Support::Truncated => "truncated" },
        "window": window,
        "tol": encode(tol),
        "x": f.xs().iter().map(|&x| encode(x)).collect::<Vec<_>>(),
        "value": f.values().iter().map(|&v| encode(v)).collect::<Vec<_>>(),
        "flag": f.flags().iter().map(|&fl| flag_name(fl)).collect::<Vec<_>>(),
    })
}

/// Differences between two reports: numbers within `tol·max(1, |x|)`,
/// everything else exactly. Each entry names the JSON path.
pub fn diff(expected: &Value, actual: &Value, tol: f64) -> Vec<String> {
    let mut out = Vec::new();
    walk(expected, actual, tol, "$", &mut out);
    out
}

fn walk(a: &Value, b: &Value, tol: f64, path: &str, out: &mut Vec<String>) {
    match (a, b) {
        (Value::Object(x), Value::Object(y)) => {
            for (k, va) in x {
                match y.get(k) {
                    Some(vb) => walk(va, vb, tol, &format!("{path}.{k}"), out),
                    None => out.push(format!("{path}.{k}: missing")),
                }
            }
            for k in y.keys().filter(|k| !x.contains_key(*k)) {
                out.push(format!("{path}.{k}: unexpected"));
            }
        }
        (Value::Array(x), Value::Array(y)) => {
            if x.len() != y.len() {
                out.push(format!("{path}: length {} vs {}", x.len(), y.len()));
                return;
            }
            for (i, (va, vb)) in x.iter().zip(y).enumerate() {
                walk(va, vb, tol, &format!("{path}[{i}]"), out);
            }
        }
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if !((x - y).abs() <= tol * x.abs().max(1.0)) {
                out.push(format!("{path}: {x} vs {y}"));
            }
        }
        _ => {
            if a != b {
                out.push(format!("{path}: {a} vs {b}"));
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encoding_roundtrip() {
        for x in [0.0, -1.5, f64::INFINITY, f64::NEG_INFINITY] {
            assert_eq!(decode(&encode(x)), Some(x));
        }
    }

    #[test]
    fn diff_tolerates_small_changes() {
        let a = json!({"x": [1.0, "inf"], "s": "a"});
        let b = json!({"x": [1.0 + 1e-12, "inf"], "s": "a"});
        assert!(diff(&a, &b, 1e-9).is_empty());
        let c = json!({"x": [1.1, "inf"], "s": "b", "extra": 1});
        let d = diff(&a, &c, 1e-9);
        assert_eq!(d.len(), 3, "{d:?}");
        assert!(d[0].starts_with("$.x[0]"));
    }
}
