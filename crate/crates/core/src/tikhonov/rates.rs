use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::elliptic::DataNorm;
use crate::lebesgue::GridFunction;
use crate::{Error, Result};

/// `n` independent standard normal draws from `seed`.
pub(crate) fn gaussian(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `u` plus a componentwise Gaussian perturbation rescaled to `Y`-norm
/// exactly `delta`.
pub fn add_noise(u: &GridFunction, delta: f64, data_norm: &DataNorm, seed: u64) -> Result<GridFunction> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("noise level must be nonnegative, got {delta}")));
    }
    data_norm.validate()?;
    if delta == 0.0 {
        return Ok(u.clone());
    }
    let noise = GridFunction::new(u.grid().clone(), gaussian(u.len(), seed))?;
    let n = data_norm.norm(&noise)?;
    u.axpy(delta / n, &noise)
}

/// Gaussian perturbation of a coefficient vector with Euclidean norm `delta`.
pub fn add_noise_coefficients(y: &[f64], delta: f64, seed: u64) -> Result<Vec<f64>> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::Domain(format!("noise level must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(y.to_vec());
    }
    let e = gaussian(y.len(), seed);
    let n = e.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(y.iter().zip(e).map(|(a, b)| a + delta / n * b).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(log delta, log error)`.
pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(Error::Domain(format!("rate fit needs at least 3 pairs, got {}", pairs.len())));
    }
    if let Some(p) = pairs.iter().find(|(d, e)| !(*d > 0.0 && *e > 0.0)) {
        return Err(Error::Domain(format!("rate fit needs positive values, got {p:?}")));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Degenerate("all noise levels coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Ok(RateFit { slope, intercept, r_squared })
}

/// One noise level of a rate experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub delta: f64,
    pub alpha: f64,
    pub error: f64,
    pub iterations: usize,
    pub stalled: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    /// Sorted by `delta`, descending.
    pub points: Vec<RatePoint>,
    pub fitted_slope: f64,
    pub theoretical_exponent: f64,
    pub intercept: f64,
    pub r_squared: f64,
    /// Noise levels left out of the fit because the solver stalled.
    pub excluded: Vec<f64>,
}

impl RateReport {
    pub fn pairs(&self) -> Vec<(f64, f64)> {
        self.points.iter().map(|p| (p.delta, p.error)).collect()
    }

    pub fn errors_strictly_decreasing(&self) -> bool {
        self.points.windows(2).all(|w| w[1].error < w[0].error)
    }
}

/// Checks a noise-level grid: at least 4 distinct positive levels spanning
/// at least 3 decades.
pub fn validate_delta_grid(deltas: &[f64]) -> Result<()> {
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(Error::Config("noise levels must be positive".into()));
    }
    let mut sorted = deltas.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    if sorted.len() < 4 {
        return Err(Error::Config(format!("need at least 4 distinct noise levels, got {}", sorted.len())));
    }
    let decades = (sorted[sorted.len() - 1] / sorted[0]).log10();
    if decades < 3.0 - 1e-9 {
        return Err(Error::Config(format!("noise levels must span 3 decades, got {decades:.2}")));
    }
    Ok(())
}

/// Runs `run` at every noise level (concurrently), sorts by `delta`
/// descending and fits the slope on non-stalled points.
pub fn rate_experiment<F>(deltas: &[f64], theoretical_exponent: f64, run: F) -> Result<RateReport>
where
    F: Fn(f64) -> Result<RatePoint> + Sync,
{
    validate_delta_grid(deltas)?;
    let mut points: Vec<RatePoint> = deltas.par_iter().map(|&d| run(d)).collect::<Result<_>>()?;
    points.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let fit_pairs: Vec<(f64, f64)> = points.iter().filter(|p| !p.stalled).map(|p| (p.delta, p.error)).collect();
    let excluded = points.iter().filter(|p| p.stalled).map(|p| p.delta).collect();
    let fit = fit_rate(&fit_pairs)?;
    Ok(RateReport {
        points,
        fitted_slope: fit.slope,
        theoretical_exponent,
        intercept: fit.intercept,
        r_squared: fit.r_squared,
        excluded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = (1..=6).map(|k| 10f64.powi(-k)).map(|d| (d, 3.0 * d.powf(0.5))).collect();
        let fit = fit_rate(&pairs).unwrap();
        assert!((fit.slope - 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        let flat: Vec<(f64, f64)> = pairs.iter().map(|p| (p.0, 2.0)).collect();
        assert_eq!(fit_rate(&flat).unwrap().slope, 0.0);
        assert!(fit_rate(&[(1.0, 1.0), (0.1, 0.0), (0.01, 1.0)]).is_err());
    }

    #[test]
    fn delta_grid_rules() {
        assert!(validate_delta_grid(&[1e-1, 1e-2, 1e-3, 1e-4]).is_ok());
        assert!(validate_delta_grid(&[1e-1, 1e-2, 1e-3]).is_err());
        assert!(validate_delta_grid(&[1e-1, 5e-2, 2e-2, 1e-2]).is_err());
    }
}
