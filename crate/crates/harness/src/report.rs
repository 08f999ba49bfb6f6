//! Flat-file outputs: `report.csv` with one row per noise level and
//! `summary.toml` with the fitted slope, the theoretical exponent, the
//! margin of the headline check and every check's value.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lpvsc::tikhonov::RatePoint;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::experiments::{Check, Outcome};
use crate::spec::Model;

pub const REPORT_FILE: &str = "report.csv";
pub const SUMMARY_FILE: &str = "summary.toml";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub model: Model,
    pub passed: bool,
    pub stalled: bool,
    pub slope: Option<f64>,
    pub theoretical_exponent: Option<f64>,
    pub margin: Option<f64>,
    pub r_squared: Option<f64>,
    #[serde(default)]
    pub excluded: Vec<f64>,
    pub elapsed_seconds: f64,
    #[serde(default)]
    pub constants: BTreeMap<String, f64>,
    #[serde(default)]
    pub checks: Vec<Check>,
}

impl Summary {
    pub fn from_outcome(o: &Outcome) -> Self {
        Self {
            name: o.name.clone(),
            model: o.model,
            passed: o.passed(),
            stalled: o.stalled(),
            slope: o.report.as_ref().map(|r| r.fitted_slope).filter(|v| v.is_finite()),
            theoretical_exponent: o.report.as_ref().map(|r| r.theoretical_exponent),
            margin: o.margin(),
            r_squared: o.report.as_ref().map(|r| r.r_squared).filter(|v| v.is_finite()),
            excluded: o.report.as_ref().map(|r| r.excluded.clone()).unwrap_or_default(),
            elapsed_seconds: o.elapsed_seconds,
            constants: o.constants.clone(),
            checks: o.checks.clone(),
        }
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("summary serialises")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = read(path)?;
        toml::from_str(&text).map_err(|e| HarnessError::Report(format!("{}: {}", path.display(), e.message())))
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.to_path_buf(), source })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| HarnessError::Write { path: path.to_path_buf(), source })
}

/// CSV text for `points`, columns `delta, alpha, error, iterations, stalled`.
///
/// Floats use Rust's shortest round-trip formatting, so identical runs give
/// byte-identical files.
pub fn rate_csv(points: &[RatePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for p in points {
        w.serialize(p).map_err(|e| HarnessError::Report(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Report(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn read_rate_csv(path: &Path) -> Result<Vec<RatePoint>> {
    let text = read(path)?;
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| HarnessError::Report(format!("{}: {e}", path.display())))
}

/// Writes the summary, the CSV for sweep models and any extra artifacts into
/// `dir`, returning the paths written.
pub fn write_outputs(o: &Outcome, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Write { path: dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    if let Some(r) = &o.report {
        let path = dir.join(REPORT_FILE);
        write(&path, &rate_csv(&r.points)?)?;
        written.push(path);
    }
    for (name, text) in &o.artifacts {
        let path = dir.join(name);
        write(&path, text)?;
        written.push(path);
    }
    let path = dir.join(SUMMARY_FILE);
    write(&path, &Summary::from_outcome(o).to_text())?;
    written.push(path);
    Ok(written)
}

/// Reads a report for plotting: a `report.csv` path or the directory holding
/// it. The summary next to it supplies the fitted and theoretical slopes.
pub fn load_report(path: &Path) -> Result<(Vec<RatePoint>, Option<Summary>)> {
    let csv_path = if path.is_dir() { path.join(REPORT_FILE) } else { path.to_path_buf() };
    let points = read_rate_csv(&csv_path)?;
    let summary_path = csv_path.with_file_name(SUMMARY_FILE);
    let summary = if summary_path.exists() { Some(Summary::from_path(&summary_path)?) } else { None };
    Ok((points, summary))
}
