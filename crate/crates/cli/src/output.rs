//! Rendering of tables and reports, and atomic file writes.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};

/// Name of the environment variable that redirects all output files.
pub const OUTPUT_DIR_ENV: &str = "OAR_OUTPUT_DIR";

/// A plot-ready table of scalar cells plus optional structured extras that
/// only appear in JSON output.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
    pub extra: Option<Value>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            extra: None,
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => other.to_string(),
    }
}

/// Serializes a float so that it reparses exactly; non-finite values become
/// strings since JSON has no representation for them.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        // Adding +0.0 folds −0.0 into 0.0.
        json!(x + 0.0)
    } else {
        Value::String(format!("{x}"))
    }
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map(num).unwrap_or(Value::Null)
}

fn csv_body(table: &Table) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).expect("in-memory write");
    for row in &table.rows {
        w.write_record(row.iter().map(cell)).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn metadata(config: &RunConfig) -> Value {
    json!({ "artifact": "oar", "version": oar_core::VERSION, "config": config })
}

/// Full file contents for a table in the configured format. CSV files start
/// with `#`-prefixed lines carrying the version and the resolved config.
pub fn render(config: &RunConfig, table: &Table) -> Vec<u8> {
    match config.format {
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# oar {}", oar_core::VERSION).unwrap();
            writeln!(out, "# config: {}", serde_json::to_string(config).unwrap()).unwrap();
            out.extend(csv_body(table));
            out
        }
        Format::Json => {
            let mut doc = metadata(config);
            doc["columns"] = json!(table.columns);
            doc["rows"] = json!(table.rows);
            if let Some(extra) = &table.extra {
                doc["extra"] = extra.clone();
            }
            let mut out = serde_json::to_vec_pretty(&doc).unwrap();
            out.push(b'\n');
            out
        }
    }
}

/// A structured JSON report wrapped with the version and config.
pub fn render_report(config: &RunConfig, report: Value) -> Vec<u8> {
    let mut doc = metadata(config);
    doc["report"] = report;
    let mut out = serde_json::to_vec_pretty(&doc).unwrap();
    out.push(b'\n');
    out
}

/// A CSV table with the metadata header, independent of the configured format.
pub fn render_csv(config: &RunConfig, table: &Table) -> Vec<u8> {
    let csv_config = RunConfig {
        format: Format::Csv,
        ..config.clone()
    };
    render(&csv_config, table)
}

/// Resolves the output path: `OAR_OUTPUT_DIR`, when set, replaces the
/// directory part of the requested (or default) file name.
pub fn resolve_output(requested: Option<&Path>, default_name: &str) -> PathBuf {
    let name = requested.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from(default_name));
    match std::env::var_os(OUTPUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let file = name.file_name().map(PathBuf::from).unwrap_or_else(|| PathBuf::from(default_name));
            PathBuf::from(dir).join(file)
        }
        _ => name,
    }
}

/// Writes through a temporary sibling and renames it into place, so an
/// interrupted run never leaves a partial file under the final name.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    fs::create_dir_all(&dir)?;
    let file_name = path
        .file_name()
        .ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", file_name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

/// Sibling path with a different suffix: `out/report.json` → `out/report.bounds.csv`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_render_plainly() {
        assert_eq!(cell(&json!(0.1)), "0.1");
        assert_eq!(cell(&json!("x,y")), "x,y");
        assert_eq!(cell(&Value::Null), "");
        assert_eq!(num(f64::NAN), Value::String("NaN".into()));
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/a.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(fs::read(&p).unwrap(), b"two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn sibling_names() {
        assert_eq!(sibling(Path::new("a/b.json"), "bounds.csv"), PathBuf::from("a/b.bounds.csv"));
    }
}
