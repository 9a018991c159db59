//! CSV and JSON emission with 17 significant digits.

use serde_json::{Map, Number, Value};
use std::path::{Path, PathBuf};

/// `x` with 17 significant digits; empty for `None`, `nan`/`inf` spelled out.
pub fn fmt(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

/// A JSON number carrying the same 17 digits as the CSV; non-finite values become `null`.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        Value::Number(fmt(x).parse::<Number>().expect("formatted float is valid JSON"))
    } else {
        Value::Null
    }
}

pub fn num_opt(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

#[derive(Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }
}

pub struct Assertion {
    pub name: String,
    pub pass: bool,
    pub measured: f64,
    pub threshold: f64,
}

impl Assertion {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            pass: measured <= threshold,
            measured,
            threshold,
        }
    }

    pub fn above(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            pass: measured > threshold,
            measured,
            threshold,
        }
    }

    pub fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            pass: measured < threshold,
            measured,
            threshold,
        }
    }

    fn to_json(&self) -> Value {
        let mut m = Map::new();
        m.insert("name".into(), Value::String(self.name.clone()));
        m.insert("pass".into(), Value::Bool(self.pass));
        m.insert("measured".into(), num(self.measured));
        m.insert("threshold".into(), num(self.threshold));
        Value::Object(m)
    }
}

/// Files written so far; removed unless [`Outputs::keep`] is called.
pub struct Outputs {
    written: Vec<PathBuf>,
    keep: bool,
}

impl Outputs {
    pub fn new() -> Self {
        Self {
            written: Vec::new(),
            keep: false,
        }
    }

    pub fn csv(&mut self, path: &Path, table: &Table) -> std::io::Result<()> {
        self.written.push(path.to_path_buf());
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)?;
        w.write_record(&table.header)?;
        for row in &table.rows {
            w.write_record(row)?;
        }
        w.flush()
    }

    pub fn json(&mut self, path: &Path, value: &Value) -> std::io::Result<()> {
        self.written.push(path.to_path_buf());
        let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
        text.push('\n');
        std::fs::write(path, text)
    }

    pub fn keep(mut self) {
        self.keep = true;
    }
}

impl Drop for Outputs {
    fn drop(&mut self) {
        if !self.keep {
            for p in &self.written {
                let _ = std::fs::remove_file(p);
            }
        }
    }
}

pub fn summary(
    command: &str,
    config: &std::collections::BTreeMap<String, String>,
    results: Map<String, Value>,
    assertions: &[Assertion],
) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), Value::String(command.into()));
    m.insert("version".into(), Value::String(latsamp::VERSION.into()));
    m.insert(
        "config".into(),
        Value::Object(config.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect()),
    );
    m.insert("results".into(), Value::Object(results));
    m.insert("assertions".into(), Value::Array(assertions.iter().map(Assertion::to_json).collect()));
    m.insert("pass".into(), Value::Bool(assertions.iter().all(|a| a.pass)));
    Value::Object(m)
}
