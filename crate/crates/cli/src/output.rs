//! Run manifests, CSV/JSON rendering and atomic writes.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::spec::InputDigest;

/// Embedded in every output. `args` is the argument list without `--out`,
/// enough to rerun the command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub args: Vec<String>,
    pub params: Value,
    pub seeds: Vec<u64>,
    pub inputs: Vec<InputDigest>,
    /// `SOURCE_DATE_EPOCH` when set. Wall-clock time would break byte-identical reruns.
    pub timestamp: Option<String>,
}

impl Manifest {
    pub fn timestamp_from_env() -> Option<String> {
        std::env::var("SOURCE_DATE_EPOCH").ok().filter(|s| !s.is_empty())
    }
}

pub enum Output {
    Csv { header: Vec<String>, rows: Vec<Vec<f64>> },
    Json(Value),
}

impl Output {
    pub fn csv(header: &[&str], rows: Vec<Vec<f64>>) -> Self {
        Output::Csv { header: header.iter().map(|s| s.to_string()).collect(), rows }
    }

    pub fn render(&self, manifest: &Manifest) -> CliResult<Vec<u8>> {
        let man = serde_json::to_value(manifest).map_err(|e| CliError::Input(e.to_string()))?;
        match self {
            Output::Csv { header, rows } => {
                let mut buf = Vec::new();
                writeln!(buf, "# {man}")?;
                let mut w = csv::Writer::from_writer(buf);
                w.write_record(header).map_err(csv_err)?;
                let mut cells = Vec::new();
                for row in rows {
                    cells.clear();
                    cells.extend(row.iter().map(|v| v.to_string()));
                    w.write_record(&cells).map_err(csv_err)?;
                }
                w.into_inner().map_err(|e| CliError::Io(e.into_error()))
            }
            Output::Json(v) => {
                let mut obj = match v {
                    Value::Object(m) => m.clone(),
                    other => {
                        let mut m = serde_json::Map::new();
                        m.insert("result".into(), other.clone());
                        m
                    }
                };
                obj.insert("manifest".into(), man);
                let mut bytes = serde_json::to_vec_pretty(&Value::Object(obj)).map_err(|e| CliError::Input(e.to_string()))?;
                bytes.push(b'\n');
                Ok(bytes)
            }
        }
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

/// Manifest embedded in a previously written output.
pub fn extract_manifest(bytes: &[u8]) -> CliResult<Manifest> {
    let bad = |m: String| CliError::Input(format!("no readable manifest: {m}"));
    if let Some(rest) = bytes.strip_prefix(b"# ") {
        let end = rest.iter().position(|&b| b == b'\n').unwrap_or(rest.len());
        serde_json::from_slice(&rest[..end]).map_err(|e| bad(e.to_string()))
    } else {
        let v: Value = serde_json::from_slice(bytes).map_err(|e| bad(e.to_string()))?;
        let m = v.get("manifest").cloned().ok_or_else(|| bad("missing \"manifest\" key".into()))?;
        serde_json::from_value(m).map_err(|e| bad(e.to_string()))
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}
