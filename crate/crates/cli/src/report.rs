//! Report files. Tables become `name.csv` or `name.json`
//! (`{"columns": [...], "rows": [[...]]}`); structured reports become pretty
//! JSON or a flattened `key,value` CSV.

use std::fs;
use std::path::{Path, PathBuf};

use bondwh::Error;
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::{CliError, Stage, StageExt};

pub struct ReportWriter {
    dir: PathBuf,
    format: Format,
    written: Vec<String>,
}

fn io<E: std::fmt::Display>(e: E) -> Error {
    Error::Io(e.to_string())
}

/// Writes finite numbers in shortest round-trip form and everything else as text.
fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// `{"a": {"b": [1, 2]}}` becomes `a.b.0 = 1`, `a.b.1 = 2`.
pub fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(&key(k), x, out);
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), x, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

impl ReportWriter {
    pub fn new(dir: &Path, format: Format) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(io).stage(Stage::Report)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            written: Vec::new(),
        })
    }

    fn path(&mut self, name: &str) -> PathBuf {
        let file = match self.format {
            Format::Csv => format!("{name}.csv"),
            Format::Json => format!("{name}.json"),
        };
        self.written.push(file.clone());
        self.dir.join(file)
    }

    /// File names written so far, in order.
    pub fn written(&self) -> &[String] {
        &self.written
    }

    pub fn table(&mut self, name: &str, columns: &[&str], rows: &[Vec<Value>]) -> Result<(), CliError> {
        let path = self.path(name);
        match self.format {
            Format::Csv => {
                let mut w = csv::Writer::from_path(&path).map_err(io).stage(Stage::Report)?;
                w.write_record(columns).map_err(io).stage(Stage::Report)?;
                for row in rows {
                    w.write_record(row.iter().map(cell)).map_err(io).stage(Stage::Report)?;
                }
                w.flush().map_err(io).stage(Stage::Report)
            }
            Format::Json => {
                let doc = serde_json::json!({ "columns": columns, "rows": rows });
                write_json(&path, &doc)
            }
        }
    }

    pub fn object<S: Serialize>(&mut self, name: &str, value: &S) -> Result<(), CliError> {
        let path = self.path(name);
        let v = serde_json::to_value(value).map_err(io).stage(Stage::Report)?;
        match self.format {
            Format::Json => write_json(&path, &v),
            Format::Csv => {
                let mut pairs = Vec::new();
                flatten("", &v, &mut pairs);
                let mut w = csv::Writer::from_path(&path).map_err(io).stage(Stage::Report)?;
                w.write_record(["key", "value"]).map_err(io).stage(Stage::Report)?;
                for (k, x) in pairs {
                    w.write_record([k, x]).map_err(io).stage(Stage::Report)?;
                }
                w.flush().map_err(io).stage(Stage::Report)
            }
        }
    }
}

fn write_json(path: &Path, v: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(v).map_err(io).stage(Stage::Report)?;
    text.push('\n');
    fs::write(path, text).map_err(io).stage(Stage::Report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening() {
        let mut out = Vec::new();
        flatten("", &json!({"a": {"b": [1.5, null]}, "c": "x"}), &mut out);
        assert_eq!(
            out,
            vec![
                ("a.b.0".into(), "1.5".into()),
                ("a.b.1".into(), String::new()),
                ("c".into(), "x".into())
            ]
        );
    }

    #[test]
    fn both_formats() {
        let dir = tempfile::tempdir().unwrap();
        for format in [Format::Csv, Format::Json] {
            let mut w = ReportWriter::new(dir.path(), format).unwrap();
            w.table(
                "t",
                &["lag", "value"],
                &[vec![json!(0), json!(1.0)], vec![json!(1), json!(0.25)]],
            )
            .unwrap();
            w.object("o", &json!({"x": 2})).unwrap();
            assert_eq!(w.written().len(), 2);
        }
        assert_eq!(
            std::fs::read_to_string(dir.path().join("t.csv")).unwrap(),
            "lag,value\n0,1.0\n1,0.25\n"
        );
        assert_eq!(
            std::fs::read_to_string(dir.path().join("o.csv")).unwrap(),
            "key,value\nx,2\n"
        );
        let t: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
        assert_eq!(t["rows"][1][1], json!(0.25));
    }
}
