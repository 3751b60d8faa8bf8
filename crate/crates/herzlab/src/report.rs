//! Report records and their CSV/JSON serialization.

use std::io::Write;
use std::path::Path;

use serde_json::{json, Map, Value as Json};

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Value {
    fn csv(&self) -> String {
        match self {
            Value::Int(v) => v.to_string(),
            // 17 significant digits, always with '.' and an exponent.
            Value::Float(v) if v.is_finite() => format!("{v:.16e}"),
            Value::Float(v) => if v.is_nan() { "nan" } else if *v > 0.0 { "inf" } else { "-inf" }.into(),
            Value::Text(s) => quote(s),
            Value::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Value::Int(v) => json!(v),
            Value::Float(v) if v.is_finite() => json!(v),
            Value::Float(v) => json!(v.to_string()),
            Value::Text(s) => json!(s),
            Value::Bool(b) => json!(b),
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
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

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.into())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// One row: named columns in a fixed order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record(pub Vec<(String, Value)>);

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

/// Records plus the metadata that makes them reproducible.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Vec<(String, Value)>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn render(&self, format: Format) -> Result<String, CliError> {
        if self.records.is_empty() {
            return Err(CliError::Run("report has no records".into()));
        }
        match format {
            Format::Csv => self.csv(),
            Format::Json => Ok(self.json()),
        }
    }

    fn csv(&self) -> Result<String, CliError> {
        let header: Vec<&str> = self.records[0].0.iter().map(|(k, _)| k.as_str()).collect();
        let mut out = header.iter().map(|k| quote(k)).collect::<Vec<_>>().join(",");
        out.push('\n');
        for r in &self.records {
            let keys: Vec<&str> = r.0.iter().map(|(k, _)| k.as_str()).collect();
            if keys != header {
                return Err(CliError::Run("records disagree on their columns".into()));
            }
            out.push_str(&r.0.iter().map(|(_, v)| v.csv()).collect::<Vec<_>>().join(","));
            out.push('\n');
        }
        Ok(out)
    }

    fn json(&self) -> String {
        let doc = json!({
            "meta": object(&self.meta),
            "records": self.records.iter().map(|r| object(&r.0)).collect::<Vec<_>>(),
        });
        pretty(&doc)
    }

    /// The metadata alone, as written next to CSV reports.
    pub fn render_meta(&self) -> String {
        pretty(&json!({ "meta": object(&self.meta) }))
    }

    /// Writes the report to `path` or stdout. A CSV file also gets its
    /// metadata in `<path>.meta.json`, since CSV has no place for it.
    pub fn emit(&self, format: Format, path: Option<&Path>) -> Result<(), CliError> {
        let text = self.render(format)?;
        let write = |p: &Path, text: &str| {
            std::fs::write(p, text).map_err(|e| CliError::Run(format!("cannot write {}: {e}", p.display())))
        };
        match path {
            Some(p) => {
                write(p, &text)?;
                if format == Format::Csv {
                    let mut side = p.as_os_str().to_owned();
                    side.push(".meta.json");
                    write(Path::new(&side), &self.render_meta())?;
                }
                Ok(())
            }
            None => std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Run(format!("cannot write to stdout: {e}"))),
        }
    }
}

fn object(pairs: &[(String, Value)]) -> Json {
    Json::Object(pairs.iter().map(|(k, v)| (k.clone(), v.json())).collect::<Map<_, _>>())
}

fn pretty(doc: &Json) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        Report {
            meta: vec![("command".into(), "norm".into())],
            records: vec![Record::new().with("quantity", "herz").with("value", 0.1).with("k", 3usize)],
        }
    }

    #[test]
    fn csv_layout() {
        let text = sample().render(Format::Csv).unwrap();
        assert_eq!(text, "quantity,value,k\nherz,1.0000000000000001e-1,3\n");
        assert_eq!(text.lines().count(), 2);
    }

    #[test]
    fn byte_identical_and_nonempty() {
        for f in [Format::Csv, Format::Json] {
            assert_eq!(sample().render(f).unwrap(), sample().render(f).unwrap());
        }
        let empty = Report { meta: vec![], records: vec![] };
        assert!(empty.render(Format::Csv).is_err());
        let json: Json = serde_json::from_str(&sample().render(Format::Json).unwrap()).unwrap();
        assert_eq!(json["records"][0]["k"], 3);
        assert_eq!(json["meta"]["command"], "norm");
    }

    #[test]
    fn quoting_and_mismatch() {
        let r = Report {
            meta: vec![],
            records: vec![
                Record::new().with("a", "x,y"),
                Record::new().with("b", 1usize),
            ],
        };
        assert!(r.render(Format::Csv).is_err());
        assert_eq!(quote("xy"), "xy");
        assert_eq!(quote("x,\"y"), "\"x,\"\"y\"");
    }

    #[test]
    fn csv_files_get_a_meta_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        sample().emit(Format::Csv, Some(&path)).unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
        let meta: Json = serde_json::from_str(&std::fs::read_to_string(dir.path().join("r.csv.meta.json")).unwrap()).unwrap();
        assert_eq!(meta["meta"]["command"], "norm");
        assert!(sample().emit(Format::Csv, Some(&dir.path().join("missing/r.csv"))).is_err());
    }
}
