//! Empirical constants of a decomposition: the norm-equivalence constant
//! `c*`, the duality constant `K` of the negative-order surrogate and the
//! band-split constant `C_R`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{DecompositionKind, LPDecomposition};
use crate::lebesgue::{duality_product, lp_norm, Grid, GridFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    /// Integrability exponents probed for `c*` and `K`.
    pub exponents: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    /// Order of the primal space in the duality check.
    pub theta: f64,
    /// Relative smoothness `s` in the band-split estimates.
    pub s: f64,
    /// Local ascent steps spent sharpening each extreme.
    pub refine_steps: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self { exponents: vec![1.5, 2.0, 3.0], samples: 1000, seed: 7, theta: 1.0, s: 0.5, refine_steps: 300 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub kind: DecompositionKind,
    pub dimension: usize,
    pub points: usize,
    pub samples: usize,
    pub seed: u64,
    pub exponents: Vec<f64>,
    pub theta: f64,
    pub s: f64,
    /// `max(ratio, 1/ratio)` for `ratio = ||z||_{F^0_q} / ||z||_q`.
    pub c_star: f64,
    /// Largest `|<f, g>| / (dual(f) primal(g))`.
    pub duality_constant: f64,
    /// Largest constant needed in the high- and low-pass band estimates.
    pub rbound_constant: f64,
}

impl CalibrationReport {
    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("calibration report serialises")
    }

    pub fn from_text(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }
}

/// Random test function mixing white noise, a decaying random Fourier series
/// and a single dyadic-shell harmonic, so calibration sees rough, smooth and
/// frequency-localised inputs.
pub fn random_test_function(grid: &Grid, rng: &mut impl Rng) -> GridFunction {
    use std::f64::consts::PI;
    match rng.random_range(0..3) {
        0 => GridFunction::from_fn(grid, |_| rng.sample(StandardNormal)),
        1 => {
            let modes: Vec<(f64, f64, f64, f64)> = (0..12)
                .map(|_| {
                    let kx = rng.random_range(0..grid.points() / 2) as f64;
                    let ky = if grid.dim() == 2 { rng.random_range(0..grid.points() / 2) as f64 } else { 0.0 };
                    let amp: f64 = rng.sample::<f64, _>(StandardNormal) / (1.0 + kx.hypot(ky));
                    (kx, ky, amp, rng.random_range(0.0..2.0 * PI))
                })
                .collect();
            let l = grid.lengths().to_vec();
            GridFunction::from_fn(grid, |x| {
                modes
                    .iter()
                    .map(|&(kx, ky, a, ph)| {
                        let mut arg = 2.0 * PI * kx * x[0] / l[0] + ph;
                        if l.len() == 2 {
                            arg += 2.0 * PI * ky * x[1] / l[1];
                        }
                        a * arg.cos()
                    })
                    .sum()
            })
        }
        _ => {
            let top = (grid.points() / 2).trailing_zeros();
            let k = 2f64.powi(rng.random_range(0..top.max(1)) as i32);
            let l = grid.lengths()[0];
            let ph = rng.random_range(0.0..2.0 * PI);
            GridFunction::from_fn(grid, |x| (2.0 * PI * k * x[0] / l + ph).cos())
        }
    }
}

/// One cosine per resolvable lattice frequency `(kx, ky)` with
/// `0 <= kx, ky <= points / 2`. Single frequencies are where the shell
/// overlaps (and hence the structural constants) are most visible.
pub fn harmonic_sweep(grid: &Grid) -> Vec<GridFunction> {
    use std::f64::consts::PI;
    let half = grid.points() / 2;
    let ky_max = if grid.dim() == 2 { half } else { 0 };
    let l = grid.lengths().to_vec();
    let mut out = Vec::new();
    for ky in 0..=ky_max {
        for kx in 0..=half {
            out.push(GridFunction::from_fn(grid, |x| {
                let mut arg = 2.0 * PI * kx as f64 * x[0] / l[0];
                if l.len() == 2 {
                    arg += 2.0 * PI * ky as f64 * x[1] / l[1];
                }
                arg.cos()
            }));
        }
    }
    out
}

/// Norm-equivalence ratio `||z||_{F^0_q} / ||z||_q`.
pub fn equivalence_ratio(d: &LPDecomposition, z: &GridFunction, q: f64) -> Result<f64> {
    Ok(d.square_function_norm(z, 0.0, q)? / lp_norm(z, q)?)
}

/// `|<f, g>| / (dual_theta,p(f) * primal_theta,q(g))`.
pub fn duality_ratio(d: &LPDecomposition, f: &GridFunction, g: &GridFunction, theta: f64, q: f64) -> Result<f64> {
    let p = q / (q - 1.0);
    let denom = d.tl_dual_norm(f, theta, p)? * d.square_function_norm(g, theta, q)?;
    Ok(duality_product(f, g)?.abs() / denom)
}

/// Constants needed in the band-split estimates
/// `||Q_lambda f||_{F^0_q} <= C 2^{s theta} 2^{-lambda s theta} ||f||_{F^{s theta}_q}` and
/// `||P_lambda f||_{F^theta_q} <= C 2^{(lambda+1) theta (1-s)} ||f||_{F^{s theta}_q}`.
pub fn band_split_constants(
    d: &LPDecomposition,
    f: &GridFunction,
    lambda: f64,
    s: f64,
    theta: f64,
    q: f64,
) -> Result<(f64, f64)> {
    let base = d.square_function_norm(f, s * theta, q)?;
    if base == 0.0 {
        return Ok((0.0, 0.0));
    }
    let high = d.square_function_norm(&d.high_pass(lambda, f)?, 0.0, q)?;
    let low = d.square_function_norm(&d.low_pass(lambda, f)?, theta, q)?;
    let high_c = high * 2f64.powf((lambda - 1.0) * s * theta) / base;
    let low_c = low / (2f64.powf((lambda + 1.0) * theta * (1.0 - s)) * base);
    Ok((high_c, low_c))
}

/// Supremum over all `lambda >= 1` of [`band_split_constants`].
///
/// The split only changes at integers, the high-pass weight grows with
/// `lambda` and the low-pass weight shrinks, so the supremum over
/// `[L, L+1)` is the limit at `L+1` for the former and the value at `L`
/// for the latter.
pub fn band_split_sup(d: &LPDecomposition, f: &GridFunction, s: f64, theta: f64, q: f64) -> Result<f64> {
    let mut sup: f64 = 0.0;
    for l in 1..=d.j_max().max(1) {
        let (h, lo) = band_split_constants(d, f, l as f64, s, theta, q)?;
        sup = sup.max(h * 2f64.powf(s * theta)).max(lo);
    }
    Ok(sup)
}

/// Pushes `ratio(z)` towards its extreme by random local perturbations,
/// keeping only improving steps. `sign = 1` maximises, `-1` minimises.
fn climb(
    grid: &Grid,
    rng: &mut impl Rng,
    mut z: GridFunction,
    sign: f64,
    steps: usize,
    ratio: impl Fn(&GridFunction) -> Result<f64>,
) -> Result<f64> {
    let mut best = ratio(&z)?;
    let mut step = 0.3;
    for _ in 0..steps {
        let dir = random_test_function(grid, rng);
        let (nz, nd) = (lp_norm(&z, 2.0)?, lp_norm(&dir, 2.0)?);
        if nd == 0.0 {
            continue;
        }
        let cand = z.axpy(step * nz / nd, &dir)?;
        if cand.is_zero() {
            continue;
        }
        let r = ratio(&cand)?;
        if sign * (r - best) > 0.0 {
            best = r;
            z = cand;
            step = (step * 1.5).min(1.0);
        } else {
            step = (step * 0.8).max(1e-3);
        }
    }
    Ok(best)
}

/// Measures `c*`, `K` and `C_R` and stores `c*` on the decomposition.
///
/// Each constant is a supremum. It is seeded by a sweep over all lattice
/// harmonics, then `cfg.samples` random functions per exponent locate
/// mixed-frequency extremes, which are sharpened by `cfg.refine_steps`
/// steps of random local ascent.
pub fn calibrate(d: &mut LPDecomposition, cfg: &CalibrationConfig) -> Result<CalibrationReport> {
    if cfg.samples == 0 || cfg.exponents.is_empty() {
        return Err(Error::Config("calibration needs samples and at least one exponent".into()));
    }
    let grid = d.grid().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (mut c_star, mut k, mut c_r): (f64, f64, f64) = (1.0, 0.0, 0.0);
    let sweep = harmonic_sweep(&grid);
    for &q in &cfg.exponents {
        for h in &sweep {
            let r = equivalence_ratio(d, h, q)?;
            c_star = c_star.max(r).max(1.0 / r);
            k = k.max(duality_ratio(d, h, h, cfg.theta, q)?);
            c_r = c_r.max(band_split_sup(d, h, cfg.s, cfg.theta, q)?);
        }
        let mut lowest: Option<(f64, GridFunction)> = None;
        let mut highest: Option<(f64, GridFunction)> = None;
        let mut worst_band: Option<(f64, GridFunction)> = None;
        let mut worst_pair: Option<(f64, GridFunction, GridFunction)> = None;
        for _ in 0..cfg.samples {
            let z = random_test_function(&grid, &mut rng);
            if z.is_zero() {
                continue;
            }
            let r = equivalence_ratio(d, &z, q)?;
            if lowest.as_ref().is_none_or(|(v, _)| r < *v) {
                lowest = Some((r, z.clone()));
            }
            if highest.as_ref().is_none_or(|(v, _)| r > *v) {
                highest = Some((r, z.clone()));
            }

            let g = random_test_function(&grid, &mut rng);
            if !g.is_zero() {
                let r = duality_ratio(d, &z, &g, cfg.theta, q)?;
                if worst_pair.as_ref().is_none_or(|(v, _, _)| r > *v) {
                    worst_pair = Some((r, z.clone(), g));
                }
            }

            let b = band_split_sup(d, &z, cfg.s, cfg.theta, q)?;
            if worst_band.as_ref().is_none_or(|(v, _)| b > *v) {
                worst_band = Some((b, z));
            }
        }
        let ratio = |z: &GridFunction| equivalence_ratio(d, z, q);
        if let Some((_, z)) = lowest {
            let r = climb(&grid, &mut rng, z, -1.0, cfg.refine_steps, ratio)?;
            c_star = c_star.max(1.0 / r);
        }
        if let Some((_, z)) = highest {
            let r = climb(&grid, &mut rng, z, 1.0, cfg.refine_steps, ratio)?;
            c_star = c_star.max(r);
        }
        if let Some((_, f, g)) = worst_pair {
            let pair = |f: &GridFunction| duality_ratio(d, f, &g, cfg.theta, q);
            k = k.max(climb(&grid, &mut rng, f, 1.0, cfg.refine_steps, pair)?);
        }
        if let Some((_, z)) = worst_band {
            let band = |z: &GridFunction| band_split_sup(d, z, cfg.s, cfg.theta, q);
            c_r = c_r.max(climb(&grid, &mut rng, z, 1.0, cfg.refine_steps, band)?);
        }
    }
    d.set_c_star(c_star);
    Ok(CalibrationReport {
        kind: d.kind(),
        dimension: grid.dim(),
        points: grid.points(),
        samples: cfg.samples,
        seed: cfg.seed,
        exponents: cfg.exponents.clone(),
        theta: cfg.theta,
        s: cfg.s,
        c_star,
        duality_constant: k,
        rbound_constant: c_r,
    })
}
