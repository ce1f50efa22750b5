use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::args::{Format, OutputArgs};

/// Run metadata carried into every JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub command: String,
    pub model: String,
    pub parameters: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub version: &'static str,
}

/// A rectangular result with named columns. Missing values, including numbers
/// that are not finite, are empty cells in CSV and `null` in JSON.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            let _ = writeln!(s, "{}", cells.join(","));
        }
        s
    }

    pub fn records(&self) -> Vec<Value> {
        self.rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().cloned()).collect();
                Value::Object(obj)
            })
            .collect()
    }
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `f64` as a JSON number, or `null` when not finite.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
}

/// Where a command's results go. `extras` land in the JSON document next to
/// the rows; in CSV mode `sidecar` extras are written to `<out>.<name>.json`.
pub struct Report {
    pub metadata: Metadata,
    pub table: Table,
    pub extras: Map<String, Value>,
    pub sidecars: Vec<(String, Value)>,
}

impl Report {
    pub fn new(metadata: Metadata, table: Table) -> Self {
        Report {
            metadata,
            table,
            extras: Map::new(),
            sidecars: Vec::new(),
        }
    }

    pub fn write(&self, out: &OutputArgs) -> io::Result<()> {
        match out.format {
            Format::Csv => {
                emit(out.out.as_deref(), &self.table.to_csv())?;
                if let Some(path) = &out.out {
                    for (name, value) in &self.sidecars {
                        fs::write(sidecar_path(path, name), pretty(value) + "\n")?;
                    }
                }
                Ok(())
            }
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("metadata".into(), serde_json::to_value(&self.metadata).expect("metadata serializes"));
                doc.insert("columns".into(), json!(self.table.columns));
                doc.insert("rows".into(), Value::Array(self.table.records()));
                for (k, v) in self.extras.iter().chain(self.sidecars.iter().map(|(k, v)| (k, v))) {
                    doc.insert(k.clone(), v.clone());
                }
                emit(out.out.as_deref(), &(pretty(&Value::Object(doc)) + "\n"))
            }
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("JSON values serialize")
}

fn emit(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

/// `results.csv` → `results.atoms.json`.
pub fn sidecar_path(path: &Path, name: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{name}.json"))
}
