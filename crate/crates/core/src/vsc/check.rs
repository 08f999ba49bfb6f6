use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::index::{HolderIndex, IndexFunction};
use crate::lebesgue::{duality_map, duality_product, lp_norm, Exponents, GridFunction};
use crate::paley::LPDecomposition;
use crate::{Error, Result};

/// A point of the forward operator's domain together with its data-space
/// distance to the exact solution's image.
#[derive(Debug, Clone)]
pub struct Sample {
    pub x: GridFunction,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    /// Largest observed `dual(x_dag - x) / Psi0(distance)`.
    pub least_constant: f64,
    pub sample_count: usize,
    /// Samples with `x == x_dag`, skipped under the 0/0 convention.
    pub skipped: usize,
}

/// Smallest constant in `dual_theta(x_dag - x) <= C Psi0(||T x_dag - T x||)`
/// consistent with `samples`.
pub fn check_stability(
    samples: &[Sample],
    x_dag: &GridFunction,
    base: &HolderIndex,
    theta: f64,
    decomp: &LPDecomposition,
    p: f64,
) -> Result<StabilityReport> {
    if samples.is_empty() {
        return Err(Error::Config("stability check needs at least one sample".into()));
    }
    let ratios: Vec<Option<f64>> = samples
        .par_iter()
        .enumerate()
        .map(|(i, smp)| {
            let num = decomp.tl_dual_norm(&(x_dag - &smp.x), theta, p)?;
            if num == 0.0 {
                return Ok(None);
            }
            let den = base.eval(smp.distance);
            if den == 0.0 {
                return Err(Error::NonIdentifiable { index: i });
            }
            Ok(Some(num / den))
        })
        .collect::<Result<_>>()?;
    let skipped = ratios.iter().filter(|r| r.is_none()).count();
    let least_constant = ratios.into_iter().flatten().fold(0.0, f64::max);
    Ok(StabilityReport { least_constant, sample_count: samples.len(), skipped })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VscReport {
    pub beta: f64,
    pub convexity_constant: f64,
    pub constant: f64,
    /// Minimum over samples of right-hand side minus left-hand side.
    pub worst_margin: f64,
    pub violating_sample: Option<usize>,
    pub sample_count: usize,
}

impl VscReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.worst_margin >= -tolerance
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("report serialises")
    }
}

/// The fixed data of a variational source condition
/// `<x_dag - x, J(x_dag - x_star)> <= ((c_p - beta)/p_hat) ||x - x_dag||^{p_hat} + Psi(dist)`.
#[derive(Debug, Clone, Copy)]
pub struct VscSetting<'a> {
    pub x_dag: &'a GridFunction,
    pub x_star: &'a GridFunction,
    pub beta: f64,
    /// Estimated uniform convexity constant of `L^p`.
    pub c_p: f64,
    pub exponents: Exponents,
}

impl VscSetting<'_> {
    fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta < self.c_p) {
            return Err(Error::Domain(format!("beta must lie in (0, {}), got {}", self.c_p, self.beta)));
        }
        Ok(())
    }

    /// `(lhs, convexity term)` of every sample, in order.
    fn terms(&self, samples: &[Sample]) -> Result<Vec<(f64, f64)>> {
        self.validate()?;
        let e = &self.exponents;
        let source = duality_map(&(self.x_dag - self.x_star), e)?;
        let weight = (self.c_p - self.beta) / e.p_hat;
        samples
            .par_iter()
            .map(|smp| {
                let diff = self.x_dag - &smp.x;
                let lhs = duality_product(&diff, &source)?;
                Ok((lhs, weight * lp_norm(&diff, e.p)?.powf(e.p_hat)))
            })
            .collect()
    }
}

/// Evaluates the variational source condition on every sample.
pub fn check_vsc(samples: &[Sample], setting: &VscSetting, psi: &IndexFunction) -> Result<VscReport> {
    let terms = setting.terms(samples)?;
    let (worst_margin, violating_sample) =
        terms.iter().zip(samples).enumerate().fold((f64::INFINITY, None), |(m, arg), (i, (&(lhs, convex), smp))| {
            let v = convex + psi.eval(smp.distance) - lhs;
            if v < m {
                (v, Some(i))
            } else {
                (m, arg)
            }
        });
    Ok(VscReport {
        beta: setting.beta,
        convexity_constant: setting.c_p,
        constant: psi.c,
        worst_margin,
        violating_sample: violating_sample.filter(|_| worst_margin < 0.0),
        sample_count: samples.len(),
    })
}

/// Smallest power of two `C` (at least `c_min`) for which every sampled
/// margin is nonnegative.
///
/// Margins are affine and increasing in `C`, so each sample has a closed-form
/// requirement; the power of two above the largest one is returned.
pub fn calibrate_vsc_constant(
    samples: &[Sample],
    setting: &VscSetting,
    psi: &IndexFunction,
    c_min: f64,
) -> Result<f64> {
    let unit = psi.with_constant(1.0)?;
    let mut required = c_min;
    for (i, ((lhs, convex), smp)) in setting.terms(samples)?.into_iter().zip(samples).enumerate() {
        let deficit = lhs - convex;
        if deficit <= 0.0 {
            continue;
        }
        let per_unit = unit.eval(smp.distance);
        if per_unit == 0.0 {
            return Err(Error::NonIdentifiable { index: i });
        }
        required = required.max(deficit / per_unit);
    }
    Ok(2f64.powi(required.log2().ceil() as i32).max(c_min))
}
