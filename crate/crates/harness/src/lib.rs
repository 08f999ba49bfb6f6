//! Batch runner for the `lpvsc` experiments: TOML experiment files in,
//! CSV reports, TOML summaries and SVG plots out.

// `!(x > 0.0)` deliberately rejects NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod plot;
pub mod report;
pub mod spec;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub use error::{HarnessError, Result};
pub use experiments::{run, Check, Outcome};
pub use report::Summary;
pub use spec::{ExperimentSpec, Model};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LPVSC_OUT_DIR";

/// Process exit codes.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const FAIL: i32 = 2;
    pub const INVALID_SPEC: i32 = 3;
    pub const STALL: i32 = 4;
}

/// An experiment file bundled with the harness.
#[derive(Debug, Clone, Copy)]
pub struct ShippedSpec {
    pub name: &'static str,
    /// What the experiment demonstrates.
    pub purpose: &'static str,
    pub text: &'static str,
}

macro_rules! shipped {
    ($($name:literal => $purpose:literal),* $(,)?) => {
        &[$(ShippedSpec {
            name: $name,
            purpose: $purpose,
            text: include_str!(concat!("../specs/", $name, ".toml")),
        }),*]
    };
}

/// Bundled experiments, in acceptance order.
pub const SHIPPED_SPECS: &[ShippedSpec] = shipped! {
    "diagonal_s025" => "optimal rate of the diagonal model, s = 1/4",
    "diagonal_s05" => "optimal rate of the diagonal model, s = 1/2",
    "diagonal_s1" => "optimal rate of the diagonal model, s = 1",
    "duality" => "duality-map pairing and norm identities",
    "convexity" => "uniform convexity gap and c_p(2) = 1",
    "lp_calibration" => "Littlewood-Paley identities and the constants c*, K, C_R",
    "rbound" => "R-bound baseline: identity and the q = 2 equivalence",
    "index_function" => "index-function shape, inf-form accuracy and decay",
    "forward_solver" => "finite-volume solver convergence orders",
    "stability" => "conditional stability ratio under sample doubling",
    "vsc_check" => "variational source-condition margins with a calibrated constant",
    "elliptic" => "rate of the nonlinear coefficient problem in L^2",
    "holder" => "Hölder constants of the power map's top derivative",
};

pub fn shipped_spec(name: &str) -> Option<&'static ShippedSpec> {
    SHIPPED_SPECS.iter().find(|s| s.name == name)
}

/// Loads a spec from a file, falling back to a bundled spec of that name.
pub fn load_spec(arg: &str) -> Result<ExperimentSpec> {
    let path = Path::new(arg);
    if path.exists() {
        return ExperimentSpec::from_path(path);
    }
    let key = path.file_stem().and_then(|s| s.to_str()).unwrap_or(arg);
    match shipped_spec(key) {
        Some(s) => ExperimentSpec::from_text(s.text),
        None => ExperimentSpec::from_path(path),
    }
}

/// Output directory: `spec.output`, else `<base>/<name>` where `base` is the
/// override, then `$LPVSC_OUT_DIR`, then `out`.
pub fn output_dir(spec: &ExperimentSpec, base: Option<&Path>) -> PathBuf {
    if let Some(p) = &spec.output {
        return p.clone();
    }
    let base = base
        .map(Path::to_path_buf)
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    base.join(&spec.name)
}

pub fn exit_code(outcome: &Outcome) -> i32 {
    if outcome.stalled() {
        exit::STALL
    } else if outcome.passed() {
        exit::PASS
    } else {
        exit::FAIL
    }
}

pub fn error_exit_code(e: &HarnessError) -> i32 {
    match e {
        HarnessError::Spec(_) => exit::INVALID_SPEC,
        _ => exit::OTHER,
    }
}

/// Runs `spec` and writes its outputs.
pub fn run_and_write(spec: &ExperimentSpec, base: Option<&Path>) -> Result<(Outcome, Vec<PathBuf>)> {
    let outcome = run(spec)?;
    let written = report::write_outputs(&outcome, &output_dir(spec, base))?;
    Ok((outcome, written))
}

/// Renders the report at `report_path` (a CSV or its directory) to an SVG.
pub fn plot_report(report_path: &Path, out: &Path) -> Result<()> {
    let (points, summary) = report::load_report(report_path)?;
    let slopes = plot::slopes_for(&points, summary.as_ref());
    let title = summary.as_ref().map(|s| s.name.clone()).unwrap_or_else(|| report_path.display().to_string());
    let svg = plot::render_svg(&title, &points, slopes)?;
    std::fs::write(out, svg).map_err(|source| HarnessError::Write { path: out.to_path_buf(), source })
}

/// Runs only the calibration stage of `spec` and returns the constants.
pub fn calibrate(spec: &ExperimentSpec) -> Result<BTreeMap<String, f64>> {
    match spec.model {
        Model::LpCalibration => Ok(run(spec)?.constants),
        Model::Elliptic | Model::VscCheck => {
            let mut spec = spec.clone();
            spec.psi.constant = None;
            experiments::calibrate_vsc(&spec)
        }
        Model::Convexity => {
            let e = lpvsc::Exponents::new(spec.p.unwrap_or(2.0))?;
            let c = lpvsc::lebesgue::estimate_cp(&e, spec.samples.unwrap_or(10_000), spec.seed(0))?;
            Ok(BTreeMap::from([("c_p".to_string(), c)]))
        }
        m => Err(HarnessError::Spec(format!("model {} has no calibration stage", m.name()))),
    }
}
