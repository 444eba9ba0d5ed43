//! Run-directory persistence: deterministic artifacts plus a manifest with their hashes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, SCHEMA_VERSION};
use crate::error::{CliError, Result};

pub const MANIFEST: &str = "manifest.json";
pub const RESULT: &str = "result.json";

/// Seventeen significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Everything needed to reproduce a run. Only `wall_time_seconds` and `threads` may differ
/// between reruns; the artifacts they hash are bit-identical.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub schema_version: u32,
    pub experiment: String,
    pub name: String,
    pub code_version: String,
    pub seeds: Vec<u64>,
    pub config: RunConfig,
    pub wall_time_seconds: f64,
    pub threads: usize,
    /// File name to lowercase hex SHA-256.
    pub artifacts: BTreeMap<String, String>,
}

/// Writes artifacts into one run directory and remembers their hashes.
pub struct RunWriter {
    dir: PathBuf,
    artifacts: BTreeMap<String, String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl RunWriter {
    /// Creates the directory (and parents) when missing.
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Io { path: dir.to_path_buf(), source: e })?;
        Ok(Self { dir: dir.to_path_buf(), artifacts: BTreeMap::new() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::Io { path, source: e })?;
        self.artifacts.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    pub fn write_csv(&mut self, name: &str, header: &[String], rows: &[Vec<String>]) -> Result<()> {
        let bytes = csv_bytes(header, rows).map_err(|e| match e {
            CliError::Io { source, .. } => CliError::Io { path: self.dir.join(name), source },
            other => other,
        })?;
        self.write_bytes(name, &bytes)
    }

    /// Writes the manifest last so a present manifest implies complete artifacts.
    pub fn finish(self, experiment: &str, config: &RunConfig, wall_time_seconds: f64) -> Result<ExperimentRecord> {
        let record = ExperimentRecord {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            name: config.name.clone().unwrap_or_else(|| experiment.to_string()),
            code_version: env!("CARGO_PKG_VERSION").to_string(),
            seeds: config.seeds.clone(),
            config: config.clone(),
            wall_time_seconds,
            threads: rayon::current_num_threads(),
            artifacts: self.artifacts,
        };
        let mut text = serde_json::to_string_pretty(&record)?;
        text.push('\n');
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, text).map_err(|e| CliError::Io { path, source: e })?;
        Ok(record)
    }
}

/// CSV with a header row; every row must match the header width.
pub fn csv_bytes(header: &[String], rows: &[Vec<String>]) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    writer.into_inner().map_err(|e| CliError::Io { path: PathBuf::from("<csv>"), source: e.into_error() })
}

/// Header cells from string literals.
pub fn header(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}
