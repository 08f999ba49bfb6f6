use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Hölder-type base index function `delta -> delta^mu`, `mu in (0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderIndex {
    pub mu: f64,
}

impl HolderIndex {
    pub fn new(mu: f64) -> Result<Self> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::Domain(format!("Hölder exponent must lie in (0, 1], got {mu}")));
        }
        Ok(Self { mu })
    }

    pub fn eval(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            0.0
        } else {
            delta.powf(self.mu)
        }
    }
}

/// Norms of the dual source element in the two spaces the index function
/// needs: smoothness `s * theta` and smoothness `theta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceNorms {
    pub smooth: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IndexKind {
    /// `C ||f||_{F^theta} Psi0(delta)`.
    LinearInBase,
    /// `C inf_{lambda >= 1} [2^{-lambda qh s theta} A + 2^{(lambda+1) theta (1-s)} B Psi0(delta)]`
    /// with `A = ||f||^{qh}_{F^{s theta}}` and `B = ||f||_{F^{s theta}}`.
    InfForm,
}

/// Concave, strictly increasing index function built from a base Hölder
/// function and the regularity of the dual source element.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexFunction {
    pub kind: IndexKind,
    pub c: f64,
    pub s: f64,
    pub theta: f64,
    pub q_hat: f64,
    pub norms: SourceNorms,
    pub base: HolderIndex,
}

impl IndexFunction {
    /// Builds the index function and verifies monotonicity, concavity and
    /// vanishing at zero on a logarithmic grid.
    pub fn new(c: f64, s: f64, theta: f64, q_hat: f64, norms: SourceNorms, base: HolderIndex) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!("smoothness s must lie in (0, 1], got {s}")));
        }
        if !(theta >= 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("theta must be >= 0, got {theta}")));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::Domain(format!("constant C must be positive, got {c}")));
        }
        if !(q_hat > 1.0 && q_hat <= 2.0) {
            return Err(Error::InvalidExponent { value: q_hat, reason: "q_hat must lie in (1, 2]" });
        }
        if !(norms.smooth >= 0.0 && norms.theta >= 0.0) {
            return Err(Error::Domain("source norms must be nonnegative".into()));
        }
        let kind = if s == 1.0 || theta == 0.0 { IndexKind::LinearInBase } else { IndexKind::InfForm };
        let psi = Self { kind, c, s, theta, q_hat, norms, base };
        psi.verify_shape()?;
        Ok(psi)
    }

    /// Same function with a different leading constant.
    pub fn with_constant(&self, c: f64) -> Result<Self> {
        Self::new(c, self.s, self.theta, self.q_hat, self.norms, self.base)
    }

    fn source_is_zero(&self) -> bool {
        match self.kind {
            IndexKind::LinearInBase => self.norms.theta == 0.0,
            IndexKind::InfForm => self.norms.smooth == 0.0,
        }
    }

    /// Value at `delta`; `delta <= 0` evaluates to zero.
    pub fn eval(&self, delta: f64) -> f64 {
        if delta <= 0.0 {
            return 0.0;
        }
        let base = self.base.eval(delta);
        match self.kind {
            IndexKind::LinearInBase => self.c * self.norms.theta * base,
            IndexKind::InfForm => {
                if self.source_is_zero() {
                    return 0.0;
                }
                self.c * self.bracket(self.minimizing_lambda(delta), base)
            }
        }
    }

    /// The bracketed expression at a given `lambda` (without `C`).
    pub fn bracket(&self, lambda: f64, base_value: f64) -> f64 {
        let b = self.norms.smooth;
        let a = b.powf(self.q_hat);
        let decay = (-lambda * self.q_hat * self.s * self.theta * std::f64::consts::LN_2).exp();
        let growth = ((lambda + 1.0) * self.theta * (1.0 - self.s) * std::f64::consts::LN_2).exp();
        a * decay + growth * b * base_value
    }

    /// The `lambda` balancing both terms asymptotically,
    /// `2^{-lambda theta} = Psi0(delta)^{1/(1 + (qh-1) s)}`, clamped to `>= 1`.
    pub fn balancing_lambda(&self, delta: f64) -> f64 {
        let e = 1.0 / (1.0 + (self.q_hat - 1.0) * self.s);
        let l = -e * self.base.eval(delta).log2() / self.theta;
        l.max(1.0)
    }

    /// Exact minimiser over `lambda >= 1` of the bracket.
    ///
    /// The bracket is `A e^{-a lambda} + B' e^{b lambda}`, strictly convex,
    /// so its stationary point `lambda* = ln(a A / (b B')) / (a + b)` is the
    /// unconstrained minimiser; clamping to `1` handles the constraint.
    pub fn minimizing_lambda(&self, delta: f64) -> f64 {
        let ln2 = std::f64::consts::LN_2;
        let b_norm = self.norms.smooth;
        let a = self.q_hat * self.s * self.theta * ln2;
        let b = self.theta * (1.0 - self.s) * ln2;
        let big_a = b_norm.powf(self.q_hat);
        let big_b = 2f64.powf(self.theta * (1.0 - self.s)) * b_norm * self.base.eval(delta);
        if big_b == 0.0 || big_a == 0.0 {
            return 1.0;
        }
        // ln(a A) - ln(b B') kept in log form: B' underflows for tiny delta.
        let l = ((a * big_a).ln() - (b * big_b).ln()) / (a + b);
        if l.is_finite() {
            l.max(1.0)
        } else {
            self.balancing_lambda(delta)
        }
    }

    /// `(qh s) / (1 + (qh - 1) s)`: the power of `Psi0` governing decay.
    pub fn decay_exponent(&self) -> f64 {
        self.q_hat * self.s / (1.0 + (self.q_hat - 1.0) * self.s)
    }

    /// `Psi(delta) / Psi0(delta)^{decay_exponent}`, bounded as `delta -> 0`.
    pub fn decay_ratio(&self, delta: f64) -> Result<f64> {
        if !(delta > 0.0) {
            return Err(Error::Domain(format!("decay ratio needs delta > 0, got {delta}")));
        }
        Ok(self.eval(delta) / self.base.eval(delta).powf(self.decay_exponent()))
    }

    fn verify_shape(&self) -> Result<()> {
        if self.source_is_zero() {
            return Ok(());
        }
        let grid: Vec<f64> = (0..=56).map(|k| 10f64.powf(-12.0 + 0.25 * k as f64)).collect();
        let vals: Vec<f64> = grid.iter().map(|&d| self.eval(d)).collect();
        if vals.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numerical("index function is not finite on the check grid".into()));
        }
        if vals.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::Validation("index function is not strictly increasing".into()));
        }
        let scale = vals.last().copied().unwrap_or(1.0);
        for i in 0..grid.len() {
            for j in (i + 1)..grid.len() {
                for t in [0.25, 0.5, 0.75] {
                    let mid = self.eval(t * grid[i] + (1.0 - t) * grid[j]);
                    if mid < t * vals[i] + (1.0 - t) * vals[j] - 1e-10 * scale.max(1.0) {
                        return Err(Error::Validation(format!(
                            "index function is not concave between {} and {}",
                            grid[i], grid[j]
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// A-priori parameter choice `alpha = delta^ell / Psi(delta)`.
pub fn alpha_choice(delta: f64, ell: f64, psi: &IndexFunction) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Domain(format!("noise level must be positive, got {delta}")));
    }
    if !(ell > 1.0) {
        return Err(Error::Domain(format!("fidelity power must exceed 1, got {ell}")));
    }
    let v = psi.eval(delta);
    if !(v > 0.0) {
        return Err(Error::Degenerate(format!("index function vanishes at delta = {delta}")));
    }
    Ok(delta.powf(ell) / v)
}
