use std::io::Write;
use std::path::Path;

use ou_design::emit::{csv_document, sig15};
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// A computed result ready for CSV or JSON.
///
/// `rows` are emitted under `header` in CSV and as a `columns`/`rows` pair in JSON;
/// `fields` are scalar results that become top-level JSON keys and `#` lines in CSV.
pub struct Emission {
    pub metadata: Vec<(String, Value)>,
    pub fields: Vec<(String, Value)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(sig15(v)).map(Value::Number).unwrap_or(Value::Null)
}

/// Rounds every float in a serialized value to 15 significant digits.
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Number(n) => n.as_f64().map(ou_design::emit::fmt15).unwrap_or_else(|| n.to_string()),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl Emission {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut top = Map::new();
                top.insert("metadata".into(), Value::Object(self.metadata.iter().cloned().collect()));
                for (k, v) in &self.fields {
                    top.insert(k.clone(), v.clone());
                }
                if !self.header.is_empty() {
                    top.insert("columns".into(), self.header.iter().map(|h| Value::from(h.as_str())).collect());
                    top.insert(
                        "rows".into(),
                        Value::Array(self.rows.iter().map(|r| r.iter().map(|v| num(*v)).collect()).collect()),
                    );
                }
                let mut s = Value::Object(top).to_string();
                s.push('\n');
                s
            }
            Format::Csv => {
                let meta: Vec<(String, String)> = self
                    .metadata
                    .iter()
                    .chain(&self.fields)
                    .map(|(k, v)| (k.clone(), scalar_text(v)))
                    .collect();
                let header: Vec<&str> = self.header.iter().map(String::as_str).collect();
                csv_document(&meta, &header, &self.rows)
            }
        }
    }
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::io(format!("cannot create temporary file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .and_then(|_| tmp.as_file().sync_all())
        .map_err(|e| CliError::io(format!("write failed: {e}")))?;
    tmp.persist(path)
        .map_err(|e| CliError::io(format!("cannot rename into {}: {}", path.display(), e.error)))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Emission {
        Emission {
            metadata: vec![("seed".into(), Value::from(3))],
            fields: vec![("objective".into(), num(1.0 / 3.0))],
            header: vec!["x".into(), "y".into()],
            rows: vec![vec![0.1, 2.0 / 3.0]],
        }
    }

    #[test]
    fn json_and_csv_agree() {
        let e = sample();
        let v: Value = serde_json::from_str(&e.render(Format::Json)).unwrap();
        let csv = e.render(Format::Csv);
        let last = csv.lines().last().unwrap();
        let y: f64 = last.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(y, v["rows"][0][1].as_f64().unwrap());
        assert!(csv.contains("# objective: 0.333333333333333\n"));
        assert_eq!(v["metadata"]["seed"], 3);
    }

    #[test]
    fn rounding_reaches_nested_values() {
        let v = rounded(serde_json::json!({"a": [0.1 + 0.2], "b": {"c": 1.0 / 7.0}}));
        assert_eq!(v["a"][0].as_f64().unwrap(), 0.3);
        assert_eq!(v["b"]["c"].as_f64().unwrap(), 0.142857142857143);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.txt");
        write_atomic(&path, "first").unwrap();
        write_atomic(&path, "second").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "second");
    }
}
