//! Experiment reports: one JSON document and one CSV trace per run.

use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::config::Format;
use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// Signed distance to the threshold; negative when failing.
    pub margin: Option<f64>,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, margin: Option<f64>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass,
            margin,
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub experiment: String,
    pub schema_version: u32,
    pub seed: u64,
    pub inputs: Value,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub results: Value,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub csv_header: Vec<String>,
    #[serde(skip)]
    pub csv_rows: Vec<Vec<String>>,
    pub wall_time_ms: u64,
}

impl Report {
    pub fn new(experiment: &str, seed: u64, inputs: Value) -> Self {
        Report {
            experiment: experiment.into(),
            schema_version: crate::config::SCHEMA_VERSION,
            seed,
            inputs,
            pass: true,
            checks: Vec::new(),
            results: Value::Null,
            notes: Vec::new(),
            csv_header: Vec::new(),
            csv_rows: Vec::new(),
            wall_time_ms: 0,
        }
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Writes `<experiment>.json` and/or `<experiment>.csv` into `dir`.
    pub fn write(&self, dir: &Path, format: Format) -> Result<Vec<PathBuf>, CliError> {
        let io = |p: &Path, e: &dyn std::fmt::Display| CliError::Io(p.display().to_string(), e.to_string());
        std::fs::create_dir_all(dir).map_err(|e| io(dir, &e))?;
        let mut written = Vec::new();
        if format.json() {
            let path = dir.join(format!("{}.json", self.experiment));
            std::fs::write(&path, self.to_json() + "\n").map_err(|e| io(&path, &e))?;
            written.push(path);
        }
        if format.csv() {
            let path = dir.join(format!("{}.csv", self.experiment));
            let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, &e))?;
            w.write_record(&self.csv_header).map_err(|e| io(&path, &e))?;
            for row in &self.csv_rows {
                w.write_record(row).map_err(|e| io(&path, &e))?;
            }
            w.flush().map_err(|e| io(&path, &e))?;
            written.push(path);
        }
        Ok(written)
    }
}

/// Shortest round-trip float text, `""` for missing values.
pub fn num(v: f64) -> String {
    format!("{v:e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
