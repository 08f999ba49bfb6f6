use serde::{Deserialize, Serialize};

use super::rates::{add_noise_coefficients, RatePoint};
use crate::vsc::{alpha_choice, HolderIndex, IndexFunction, SourceNorms};
use crate::{Error, Result};

/// Minimiser of `1/2 ||T x - y||^2 + alpha/2 ||x||^2` for diagonal `T`:
/// `x_k = sigma_k y_k / (sigma_k^2 + alpha)`.
pub fn diagonal_solve(singular_values: &[f64], y_delta: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if singular_values.len() != y_delta.len() {
        return Err(Error::Shape(format!(
            "{} singular values but {} data coefficients",
            singular_values.len(),
            y_delta.len()
        )));
    }
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("alpha must be positive, got {alpha}")));
    }
    if let Some(s) = singular_values.iter().find(|s| !(**s > 0.0)) {
        return Err(Error::Domain(format!("singular values must be positive, got {s}")));
    }
    Ok(singular_values.iter().zip(y_delta).map(|(s, y)| s * y / (s * s + alpha)).collect())
}

/// Linear diagonal model `sigma_k = 1/k` with exact solution
/// `x_k = k^{-s-1/2}`, which sits at the edge of the order-`s` source set,
/// so Tikhonov regularization with `alpha = delta^{2/(s+1)} / C` converges at
/// exactly the optimal order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalModel {
    pub s: f64,
    pub constant: f64,
    pub singular_values: Vec<f64>,
    pub truth: Vec<f64>,
}

impl DiagonalModel {
    pub fn new(size: usize, s: f64, constant: f64) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0) {
            return Err(Error::Domain(format!("smoothness s must lie in (0, 1], got {s}")));
        }
        if size == 0 {
            return Err(Error::Config("diagonal model needs at least one coefficient".into()));
        }
        let singular_values = (1..=size).map(|k| 1.0 / k as f64).collect();
        let truth = (1..=size).map(|k| (k as f64).powf(-s - 0.5)).collect();
        Ok(Self { s, constant, singular_values, truth })
    }

    /// `Psi(delta) = C delta^{2s/(1+s)}`.
    pub fn index_function(&self) -> Result<IndexFunction> {
        let base = HolderIndex::new(2.0 * self.s / (1.0 + self.s))?;
        IndexFunction::new(self.constant, 1.0, 1.0, 2.0, SourceNorms { smooth: 1.0, theta: 1.0 }, base)
    }

    /// Exponent of the squared error, `2s/(1+s)`.
    pub fn theoretical_exponent(&self) -> f64 {
        2.0 * self.s / (1.0 + self.s)
    }

    pub fn exact_data(&self) -> Vec<f64> {
        self.singular_values.iter().zip(&self.truth).map(|(s, x)| s * x).collect()
    }

    /// Squared error `||x_alpha^delta - x||^2` at noise level `delta`.
    pub fn run(&self, delta: f64, seed: u64) -> Result<RatePoint> {
        let y = add_noise_coefficients(&self.exact_data(), delta, seed)?;
        let alpha = alpha_choice(delta, 2.0, &self.index_function()?)?;
        let x = diagonal_solve(&self.singular_values, &y, alpha)?;
        let error = x.iter().zip(&self.truth).map(|(a, b)| (a - b).powi(2)).sum();
        Ok(RatePoint { delta, alpha, error, iterations: 1, stalled: false })
    }
}
