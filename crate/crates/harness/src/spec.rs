//! Experiment descriptions: one TOML file per experiment, with keys named
//! after the exponents they set (`p`, `p_frak`, `tau`, `q`, `s`, `theta`,
//! `ell`, `M`, `a_lower`, `delta_grid`).

use std::path::{Path, PathBuf};

use lpvsc::tikhonov::validate_delta_grid;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

const EXPONENT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Model {
    /// Linear diagonal operator with closed-form Tikhonov solutions.
    Diagonal,
    /// Nonlinear coefficient identification with projected gradient descent.
    Elliptic,
    /// Variational source-condition margins for the coefficient problem.
    VscCheck,
    /// Littlewood-Paley identities and the empirical constants `c*`, `K`, `C_R`.
    LpCalibration,
    /// Conditional stability ratio of the coefficient problem.
    Stability,
    /// Randomised R-bound estimates.
    Rbound,
    /// Duality-map identities.
    Duality,
    /// Uniform convexity gap and the convexity constant.
    Convexity,
    /// Hölder constants of the power map's top derivative.
    Holder,
    /// Shape, inf-form accuracy and decay of index functions.
    IndexFunction,
    /// Mesh convergence of the finite-volume solver.
    ForwardSolver,
}

impl Model {
    pub const ALL: [Model; 11] = [
        Model::Diagonal,
        Model::Elliptic,
        Model::VscCheck,
        Model::LpCalibration,
        Model::Stability,
        Model::Rbound,
        Model::Duality,
        Model::Convexity,
        Model::Holder,
        Model::IndexFunction,
        Model::ForwardSolver,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Model::Diagonal => "diagonal",
            Model::Elliptic => "elliptic",
            Model::VscCheck => "vsc-check",
            Model::LpCalibration => "lp-calibration",
            Model::Stability => "stability",
            Model::Rbound => "rbound",
            Model::Duality => "duality",
            Model::Convexity => "convexity",
            Model::Holder => "holder",
            Model::IndexFunction => "index-function",
            Model::ForwardSolver => "forward-solver",
        }
    }

    /// Models that produce a noise-level sweep.
    pub fn is_rate(self) -> bool {
        matches!(self, Model::Diagonal | Model::Elliptic)
    }

    fn uses_coefficient_problem(self) -> bool {
        matches!(self, Model::Elliptic | Model::VscCheck | Model::Stability)
    }
}

/// Index-function settings.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsiParams {
    /// Leading constant `C`; calibrated from samples when absent.
    pub constant: Option<f64>,
    /// Exponent of the Hölder base function `Psi0(delta) = delta^mu`.
    pub holder: Option<f64>,
}

/// Overrides for the projected-gradient solver of the elliptic model.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverParams {
    pub max_iterations: Option<usize>,
    pub starts: Option<usize>,
    pub tolerance: Option<f64>,
    /// Length of the first trial move in coefficient units.
    pub initial_step: Option<f64>,
    pub max_backtracks: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub model: Model,
    /// Grid points per axis, or coefficient count for the diagonal model.
    pub points: Option<usize>,
    /// Spatial dimension `n`.
    pub dimension: Option<usize>,
    pub p: Option<f64>,
    pub p_frak: Option<f64>,
    pub tau: Option<f64>,
    pub q: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub theta: Option<f64>,
    pub ell: Option<f64>,
    #[serde(rename = "M")]
    pub norm_bound: Option<f64>,
    pub a_lower: Option<f64>,
    #[serde(default)]
    pub delta_grid: Vec<f64>,
    /// Exponents swept by the property models (`p` or `q` values).
    #[serde(default)]
    pub exponents: Vec<f64>,
    /// `(s, q_hat)` pairs for the index-function model.
    #[serde(default)]
    pub smoothness_pairs: Vec<[f64; 2]>,
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    pub samples: Option<usize>,
    pub calibration_samples: Option<usize>,
    #[serde(default)]
    pub psi: PsiParams,
    #[serde(default)]
    pub solver: SolverParams,
    /// Output directory; defaults to `$LPVSC_OUT_DIR/<name>`.
    pub output: Option<PathBuf>,
}

fn default_seeds() -> Vec<u64> {
    vec![1]
}

impl ExperimentSpec {
    pub fn from_text(text: &str) -> Result<Self> {
        let spec: Self = toml::from_str(text).map_err(|e| HarnessError::Spec(e.message().to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|source| HarnessError::Read { path: path.to_path_buf(), source })?;
        Self::from_text(&text).map_err(|e| match e {
            HarnessError::Spec(m) => HarnessError::Spec(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("spec serialises")
    }

    pub fn seed(&self, k: usize) -> u64 {
        self.seeds.get(k).copied().unwrap_or(self.seeds[0].wrapping_add(k as u64))
    }

    /// Checks the exponent tuple against the admissibility windows of the
    /// selected model.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(HarnessError::Spec(m));
        if self.name.trim().is_empty() || self.name.contains(['/', '\\']) {
            return bad(format!("experiment name {:?} must be a nonempty file name", self.name));
        }
        if self.seeds.is_empty() {
            return bad("at least one seed is required".into());
        }
        if let Some(p) = self.p {
            if !(p > 1.0 && p.is_finite()) {
                return bad(format!("p must lie in (1, inf), got {p}"));
            }
            if let Some(q) = self.q {
                if (1.0 / p + 1.0 / q - 1.0).abs() > EXPONENT_SLACK {
                    return bad(format!("conjugate exponents: 1/p + 1/q must equal 1, got p = {p}, q = {q}"));
                }
            }
        }
        if let Some(s) = self.s {
            if !(s > 0.0 && s <= 1.0) {
                return bad(format!("smoothness s must lie in (0, 1], got {s}"));
            }
        }
        if let Some(t) = self.theta {
            if !(t >= 0.0 && t.is_finite()) {
                return bad(format!("theta must be >= 0, got {t}"));
            }
        }
        if let Some(ell) = self.ell {
            if !(ell >= 1.0 && ell.is_finite()) {
                return bad(format!("ell must be >= 1, got {ell}"));
            }
        }
        if self.model.is_rate() {
            validate_delta_grid(&self.delta_grid).map_err(|e| HarnessError::Spec(format!("delta_grid: {e}")))?;
        }
        if self.model.uses_coefficient_problem() {
            self.validate_coefficient_problem()?;
        }
        Ok(())
    }

    fn require(&self, value: Option<f64>, key: &str) -> Result<f64> {
        value.ok_or_else(|| HarnessError::Spec(format!("model {} needs key `{key}`", self.model.name())))
    }

    fn validate_coefficient_problem(&self) -> Result<()> {
        let n = self.dimension.unwrap_or(2) as f64;
        if n != 2.0 {
            return Err(HarnessError::Spec(format!(
                "the coefficient problem is set up on the unit square (dimension 2), got dimension {n}"
            )));
        }
        let p = self.require(self.p, "p")?;
        let q = self.require(self.q, "q")?;
        let p_frak = self.require(self.p_frak, "p_frak")?;
        let tau = self.require(self.tau, "tau")?;
        let m = self.require(self.norm_bound, "M")?;
        let a_lower = self.require(self.a_lower, "a_lower")?;
        let _ = (p, q);
        // tau window: p_frak > n/2, and tau in (1, inf) when p_frak >= n,
        // otherwise in (p_frak n / (n p_frak - n + p_frak), p_frak n / (n - p_frak)).
        if !(p_frak > n / 2.0) {
            return Err(HarnessError::Spec(format!(
                "tau window: p_frak must exceed n/2 = {}, got p_frak = {p_frak}",
                n / 2.0
            )));
        }
        let (lo, hi) = if p_frak >= n {
            (1.0, f64::INFINITY)
        } else {
            (p_frak * n / (n * p_frak - n + p_frak), p_frak * n / (n - p_frak))
        };
        if !(tau > lo && tau < hi) {
            return Err(HarnessError::Spec(format!(
                "tau window: with p_frak = {p_frak} and n = {n}, tau must lie in ({lo}, {hi}), got tau = {tau}"
            )));
        }
        if !(a_lower > 0.0 && m > 0.0 && a_lower <= m) {
            return Err(HarnessError::Spec(format!(
                "admissible set needs 0 < a_lower <= M on the unit square, got a_lower = {a_lower}, M = {m}"
            )));
        }
        if self.model == Model::Stability {
            let r = self.require(self.r, "r")?;
            if !(r > 1.0) || (1.0 - 1.0 / tau - 1.0 / q - 1.0 / r).abs() > EXPONENT_SLACK {
                return Err(HarnessError::Spec(format!(
                    "q-r relation: 1 - 1/tau must equal 1/q + 1/r, got tau = {tau}, q = {q}, r = {r}"
                )));
            }
        }
        if self.model == Model::Elliptic {
            if self.s != Some(1.0) {
                return Err(HarnessError::Spec(
                    "the elliptic rate model uses a band-limited source, so it needs s = 1".into(),
                ));
            }
            if tau != 2.0 || self.ell.unwrap_or(2.0) != 2.0 {
                return Err(HarnessError::Spec(
                    "the elliptic rate model measures data in L^2: tau = 2, ell = 2".into(),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ELLIPTIC: &str = r#"
name = "rate"
model = "elliptic"
points = 32
p = 1.5
q = 3.0
p_frak = 3.0
tau = 2.0
s = 1.0
theta = 0.5
ell = 2.0
M = 10.0
a_lower = 0.5
delta_grid = [1e-1, 1e-2, 1e-3, 1e-4]
"#;

    #[test]
    fn parses_and_round_trips() {
        let s = ExperimentSpec::from_text(ELLIPTIC).unwrap();
        assert_eq!(s.model, Model::Elliptic);
        assert_eq!(s.norm_bound, Some(10.0));
        assert_eq!(ExperimentSpec::from_text(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn tau_outside_window_is_named() {
        let text = ELLIPTIC.replace("p_frak = 3.0", "p_frak = 1.5").replace("tau = 2.0", "tau = 7.0");
        let err = ExperimentSpec::from_text(&text).unwrap_err().to_string();
        assert!(err.contains("tau window"), "{err}");
        let text = ELLIPTIC.replace("p_frak = 3.0", "p_frak = 0.9");
        assert!(ExperimentSpec::from_text(&text).unwrap_err().to_string().contains("tau window"));
    }

    #[test]
    fn q_r_relation_is_checked_for_stability() {
        let base = ELLIPTIC.replace("model = \"elliptic\"", "model = \"stability\"");
        assert!(ExperimentSpec::from_text(&format!("{base}r = 6.0\n")).is_ok());
        let err = ExperimentSpec::from_text(&format!("{base}r = 5.0\n")).unwrap_err().to_string();
        assert!(err.contains("q-r relation"), "{err}");
    }

    #[test]
    fn conjugate_exponents_and_unknown_keys() {
        let err = ExperimentSpec::from_text(&ELLIPTIC.replace("q = 3.0", "q = 2.5")).unwrap_err().to_string();
        assert!(err.contains("1/p + 1/q"), "{err}");
        assert!(ExperimentSpec::from_text(&format!("{ELLIPTIC}colour = 1\n")).is_err());
        assert!(ExperimentSpec::from_text(
            &ELLIPTIC.replace("delta_grid = [1e-1, 1e-2, 1e-3, 1e-4]", "delta_grid = [1e-1]")
        )
        .is_err());
    }
}
