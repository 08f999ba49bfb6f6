//! Randomised lower bounds for R-bounds of Fourier multiplier families.
//!
//! The R-bound of a family `T` is the smallest `C` with
//! `|| (sum |T_k z_k|^2)^{1/2} ||_q <= C || (sum |z_k|^2)^{1/2} ||_q` for all
//! finite tuples. Only lower bounds are computable: each trial draws a tuple
//! of operators (with repetition) and random inputs, then climbs the ratio
//! with a few steps of per-component power iteration.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::transform::Transform;
use crate::lebesgue::{lp_norm, Grid, GridFunction};
use crate::{Error, Result};

/// A bounded operator on grid functions acting diagonally in Fourier space.
#[derive(Debug, Clone, PartialEq)]
pub enum Multiplier {
    /// Applied without any transform, so it is reproduced bit for bit.
    Identity,
    /// Symbol values on the DFT lattice, laid out like the grid.
    Symbol(Vec<Complex64>),
}

impl Multiplier {
    /// Largest symbol magnitude, the operator norm on `L^2`.
    pub fn sup_magnitude(&self) -> f64 {
        match self {
            Multiplier::Identity => 1.0,
            Multiplier::Symbol(s) => s.iter().fold(0.0, |m, v| m.max(v.norm())),
        }
    }

    fn apply(&self, grid: &Grid, t: &Transform, z: &[Complex64], adjoint_too: bool) -> Vec<Complex64> {
        match self {
            Multiplier::Identity => z.to_vec(),
            Multiplier::Symbol(sym) => {
                let mut buf = z.to_vec();
                t.forward(grid, &mut buf);
                for (b, m) in buf.iter_mut().zip(sym) {
                    *b *= if adjoint_too { m.norm_sqr().into() } else { *m };
                }
                t.inverse(grid, &mut buf);
                buf
            }
        }
    }
}

/// Parameters of [`rbound_estimate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RBoundConfig {
    pub q: f64,
    pub trials: usize,
    /// Largest tuple length drawn.
    pub n_max: usize,
    pub seed: u64,
    /// Power-iteration steps per trial.
    pub ascent_steps: usize,
}

impl RBoundConfig {
    pub fn new(q: f64, trials: usize, n_max: usize, seed: u64) -> Self {
        Self { q, trials, n_max, seed, ascent_steps: 40 }
    }
}

fn square_sum_norm(grid: &Grid, parts: &[Vec<Complex64>], q: f64) -> Result<f64> {
    let mut acc = vec![0.0; grid.len()];
    for part in parts {
        for (a, v) in acc.iter_mut().zip(part) {
            *a += v.norm_sqr();
        }
    }
    lp_norm(&GridFunction::new(grid.clone(), acc.into_iter().map(f64::sqrt).collect())?, q)
}

/// Randomised lower bound on the R-bound of `ops` on `grid`.
pub fn rbound_estimate(ops: &[Multiplier], grid: &Grid, cfg: &RBoundConfig) -> Result<f64> {
    if ops.is_empty() {
        return Err(Error::Config("R-bound estimate needs at least one operator".into()));
    }
    if cfg.trials == 0 || cfg.n_max == 0 {
        return Err(Error::Config("R-bound estimate needs trials >= 1 and n_max >= 1".into()));
    }
    if !(cfg.q > 1.0) {
        return Err(Error::InvalidExponent { value: cfg.q, reason: "R-bound exponent must exceed 1" });
    }
    for op in ops {
        if let Multiplier::Symbol(s) = op {
            if s.len() != grid.len() {
                return Err(Error::Shape(format!(
                    "symbol has {} entries for a grid of {} points",
                    s.len(),
                    grid.len()
                )));
            }
        }
    }
    let t = Transform::fourier(grid.points());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: f64 = 0.0;
    for _ in 0..cfg.trials {
        let n = rng.random_range(1..=cfg.n_max);
        let chosen: Vec<&Multiplier> = (0..n).map(|_| &ops[rng.random_range(0..ops.len())]).collect();
        let mut inputs: Vec<Vec<Complex64>> = loop {
            let draw: Vec<Vec<Complex64>> = (0..n)
                .map(|_| {
                    (0..grid.len())
                        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                        .collect()
                })
                .collect();
            if draw.iter().any(|z| z.iter().any(|v| v.norm() > 0.0)) {
                break draw;
            }
        };
        for step in 0..=cfg.ascent_steps {
            let outputs: Vec<Vec<Complex64>> =
                chosen.iter().zip(&inputs).map(|(op, z)| op.apply(grid, &t, z, false)).collect();
            let denom = square_sum_norm(grid, &inputs, cfg.q)?;
            if denom == 0.0 {
                break;
            }
            best = best.max(square_sum_norm(grid, &outputs, cfg.q)? / denom);
            if step == cfg.ascent_steps {
                break;
            }
            inputs = chosen.iter().zip(&inputs).map(|(op, z)| op.apply(grid, &t, z, true)).collect();
            let scale = inputs.iter().flat_map(|z| z.iter().map(|v| v.norm())).fold(0.0, f64::max);
            if scale == 0.0 {
                break;
            }
            inputs.iter_mut().for_each(|z| z.iter_mut().for_each(|v| *v /= scale));
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_exactly_one() {
        let g = Grid::unit_square(8).unwrap();
        for q in [1.5, 2.0, 4.0] {
            let v = rbound_estimate(&[Multiplier::Identity], &g, &RBoundConfig::new(q, 20, 5, 1)).unwrap();
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let g = Grid::unit_interval(8).unwrap();
        let cfg = RBoundConfig::new(2.0, 1, 1, 0);
        assert!(rbound_estimate(&[], &g, &cfg).is_err());
        let short = Multiplier::Symbol(vec![Complex64::new(1.0, 0.0); 3]);
        assert!(matches!(rbound_estimate(&[short], &g, &cfg), Err(Error::Shape(_))));
    }

    #[test]
    fn scalar_multiple_of_identity() {
        let g = Grid::unit_interval(32).unwrap();
        let sym = Multiplier::Symbol(vec![Complex64::new(0.0, 3.0); 32]);
        let v = rbound_estimate(&[sym], &g, &RBoundConfig::new(3.0, 5, 3, 2)).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }
}
