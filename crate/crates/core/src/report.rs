//! Deterministic text and JSON reports.
//!
//! Matrices are emitted row-major with explicit dimensions. Apart from the
//! trailing `wall_time_ms` field, identical inputs produce identical output.

use std::fmt::Write as _;

use serde_json::{json, Map, Value as Json};

use crate::algebra::RealMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Text(String),
    Vector(Vec<f64>),
    Matrix(RealMatrix),
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<u64> for Value {
    fn from(v: u64) -> Self {
        Value::Int(v as i64)
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<RealMatrix> for Value {
    fn from(v: RealMatrix) -> Self {
        Value::Matrix(v)
    }
}

impl From<Vec<f64>> for Value {
    fn from(v: Vec<f64>) -> Self {
        Value::Vector(v)
    }
}

/// Shortest round-trip representation, scientific for very small or large magnitudes.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && a.is_finite() && !(1e-3..1e7).contains(&a) {
        format!("{x:e}")
    } else {
        format!("{x}")
    }
}

fn format_row(row: impl Iterator<Item = f64>) -> String {
    let items: Vec<String> = row.map(format_float).collect();
    format!("[{}]", items.join(", "))
}

fn to_json(v: &Value) -> Json {
    match v {
        Value::Int(i) => json!(i),
        Value::Float(x) if x.is_finite() => json!(x),
        Value::Float(x) => json!(x.to_string()),
        Value::Bool(b) => json!(b),
        Value::Text(s) => json!(s),
        Value::Vector(xs) => json!(xs),
        Value::Matrix(m) => {
            let data: Vec<Vec<f64>> = (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect();
            json!({ "rows": m.nrows(), "cols": m.ncols(), "data": data })
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub command: String,
    pub parameters: Vec<(String, Value)>,
    pub results: Vec<(String, Value)>,
    pub wall_time_ms: Option<f64>,
}

impl Report {
    pub fn new(command: impl Into<String>) -> Self {
        Self {
            command: command.into(),
            ..Self::default()
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.push((key.to_string(), value.into()));
        self
    }

    pub fn result(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.results.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.results.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.render_text(),
            Format::Json => self.render_json(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "command: {}", self.command);
        for (title, section) in [("parameters", &self.parameters), ("results", &self.results)] {
            let _ = writeln!(out, "{title}:");
            for (key, value) in section {
                write_text_value(&mut out, key, value);
            }
        }
        if let Some(ms) = self.wall_time_ms {
            let _ = writeln!(out, "wall_time_ms: {ms:.3}");
        }
        out
    }

    pub fn render_json(&self) -> String {
        let section = |items: &[(String, Value)]| {
            let mut map = Map::new();
            for (k, v) in items {
                map.insert(k.clone(), to_json(v));
            }
            Json::Object(map)
        };
        let mut root = Map::new();
        root.insert("command".into(), json!(self.command));
        root.insert("parameters".into(), section(&self.parameters));
        root.insert("results".into(), section(&self.results));
        if let Some(ms) = self.wall_time_ms {
            root.insert("wall_time_ms".into(), json!(ms));
        }
        let mut s = serde_json::to_string_pretty(&Json::Object(root)).expect("report serializes");
        s.push('\n');
        s
    }
}

fn write_text_value(out: &mut String, key: &str, value: &Value) {
    let _ = match value {
        Value::Int(i) => writeln!(out, "  {key}: {i}"),
        Value::Float(x) => writeln!(out, "  {key}: {}", format_float(*x)),
        Value::Bool(b) => writeln!(out, "  {key}: {b}"),
        Value::Text(s) => writeln!(out, "  {key}: {s}"),
        Value::Vector(xs) => writeln!(out, "  {key}: {}", format_row(xs.iter().copied())),
        Value::Matrix(m) => {
            let _ = writeln!(out, "  {key}: matrix {}x{}", m.nrows(), m.ncols());
            for i in 0..m.nrows() {
                let _ = writeln!(out, "    {}", format_row(m.row(i).iter().copied()));
            }
            Ok(())
        }
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    fn sample() -> Report {
        let mut r = Report::new("analyze paper-sl2");
        r.param("tol", 1e-8).param("grid", 11usize);
        r.result("psi", dmatrix![1.0, 2.0; 3.0, 4.5])
            .result("verdict", "accessible");
        r
    }

    #[test]
    fn text_layout() {
        let text = sample().render_text();
        assert_eq!(
            text,
            "command: analyze paper-sl2\nparameters:\n  tol: 1e-8\n  grid: 11\nresults:\n  psi: matrix 2x2\n    [1, 2]\n    [3, 4.5]\n  verdict: accessible\n"
        );
    }

    #[test]
    fn json_matrices_are_row_major() {
        let v: Json = serde_json::from_str(&sample().render_json()).unwrap();
        assert_eq!(v["results"]["psi"]["rows"], 2);
        assert_eq!(v["results"]["psi"]["data"][1][1], 4.5);
        assert_eq!(v["parameters"]["tol"], 1e-8);
    }
}
