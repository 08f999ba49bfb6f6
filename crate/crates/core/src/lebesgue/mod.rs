//! Discrete Lebesgue-space primitives: norms, duality pairing, the gauged
//! duality map, uniform-convexity diagnostics and the power map
//! `t -> |t|^{p-2} t`.

mod grid;
pub mod io;

pub use grid::{Grid, GridFunction, Scalar};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// A primal exponent `p` together with its conjugate `q` and the
/// convexity/smoothness powers `p_hat = max(p, 2)` and `q_hat = min(q, 2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponents {
    pub p: f64,
    pub q: f64,
    pub p_hat: f64,
    pub q_hat: f64,
}

impl Exponents {
    pub fn new(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidExponent { value: p, reason: "exponent must lie in (1, inf)" });
        }
        let q = p / (p - 1.0);
        Ok(Self { p, q, p_hat: p.max(2.0), q_hat: q.min(2.0) })
    }
}

/// `(sum |f_i|^p * cell_measure)^{1/p}`.
///
/// Evaluated relative to `max |f|` so that large exponents neither overflow
/// nor underflow.
pub fn lp_norm<T: Scalar>(f: &GridFunction<T>, p: f64) -> Result<f64> {
    if !(p >= 1.0) || p.is_nan() {
        return Err(Error::InvalidExponent { value: p, reason: "norm exponent must be >= 1" });
    }
    let m = f.max_modulus();
    if m == 0.0 {
        return Ok(0.0);
    }
    let dx = f.grid().cell_measure();
    if p.is_infinite() {
        return Ok(m);
    }
    let s: f64 = f.values().iter().map(|v| (v.modulus() / m).powf(p)).sum();
    Ok(m * (s * dx).powf(1.0 / p))
}

/// `sum f_i * conj(g_i) * cell_measure`.
pub fn duality_product<T: Scalar>(f: &GridFunction<T>, g: &GridFunction<T>) -> Result<T> {
    f.grid().ensure_same(g.grid())?;
    let dx = f.grid().cell_measure();
    let s = f.values().iter().zip(g.values()).fold(T::default(), |acc, (&a, &b)| acc + a * b.conj());
    Ok(s.scale(dx))
}

fn power_map(t: f64, p: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else {
        t.abs().powf(p - 2.0) * t
    }
}

/// Pointwise `|f|^{p-2} f`, zero where `f` vanishes.
pub fn phi_p_apply(f: &GridFunction, p: f64) -> Result<GridFunction> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent { value: p, reason: "power map needs p > 1" });
    }
    Ok(f.map(|t| power_map(t, p)))
}

/// Gauge `p_hat` duality map `J(w) = ||w||_p^{p_hat - p} |w|^{p-2} w`.
///
/// Satisfies `<w, J(w)> = ||w||^{p_hat}` and `||J(w)||_q = ||w||^{p_hat-1}`.
pub fn duality_map(w: &GridFunction, e: &Exponents) -> Result<GridFunction> {
    gauged_duality_map(w, e.p, e.p_hat)
}

/// Inverse of [`duality_map`]: the gauge `q_hat` duality map of `L^q`.
pub fn inverse_duality_map(f: &GridFunction, e: &Exponents) -> Result<GridFunction> {
    gauged_duality_map(f, e.q, e.q_hat)
}

fn gauged_duality_map(w: &GridFunction, p: f64, gauge: f64) -> Result<GridFunction> {
    let n = lp_norm(w, p)?;
    if n == 0.0 {
        return Ok(GridFunction::zeros(w.grid()));
    }
    // Normalise first: |w|^{p-2} w with huge |w| and large p overflows long
    // before the product with the norm factor does.
    let scale = n.powf(gauge - 1.0);
    Ok(w.map(|t| power_map(t / n, p) * scale))
}

/// `||w+y||^{p_hat} - ||w||^{p_hat} - p_hat <y, J(w)> - c ||y||^{p_hat}`.
pub fn convexity_gap(w: &GridFunction, y: &GridFunction, e: &Exponents, c: f64) -> Result<f64> {
    let sum = w.zip_with(y, |a, b| a + b)?;
    let jw = duality_map(w, e)?;
    let ph = e.p_hat;
    Ok(lp_norm(&sum, e.p)?.powf(ph)
        - lp_norm(w, e.p)?.powf(ph)
        - ph * duality_product(y, &jw)?
        - c * lp_norm(y, e.p)?.powf(ph))
}

/// Empirical lower estimate of the uniform convexity constant: the smallest
/// normalised gap over `sample_count` random pairs on a 16-point grid.
///
/// Increments are drawn across two decades of relative size so that both the
/// local (small `y`) and global regimes are probed.
pub fn estimate_cp(e: &Exponents, sample_count: usize, seed: u64) -> Result<f64> {
    if sample_count == 0 {
        return Err(Error::Config("estimate_cp needs at least one sample".into()));
    }
    let grid = Grid::unit_interval(16)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = f64::INFINITY;
    let mut taken = 0;
    while taken < sample_count {
        let w = GridFunction::from_fn(&grid, |_| rng.random_range(-1.0..1.0));
        let scale = 10f64.powf(rng.random_range(-1.0..1.0));
        let y = GridFunction::from_fn(&grid, |_| scale * rng.random_range(-1.0..1.0));
        let ny = lp_norm(&y, e.p)?;
        if ny == 0.0 || w.is_zero() {
            continue;
        }
        taken += 1;
        let ratio = convexity_gap(&w, &y, e, 0.0)? / ny.powf(e.p_hat);
        best = best.min(ratio);
    }
    if !(best > 0.0) {
        return Err(Error::Numerical(format!("uniform convexity estimate {best} is not positive for p = {}", e.p)));
    }
    Ok(best)
}

/// Hölder data for the highest continuous derivative of `t -> |t|^{p-2} t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderEstimate {
    /// Order of the derivative examined.
    pub order: usize,
    /// Hölder exponent in `(0, 1]`.
    pub exponent: f64,
    /// Sampled supremum of the Hölder quotient.
    pub constant_estimate: f64,
    /// Product `(p-1)(p-2)...(p-order)`, the derivative's leading factor.
    pub leading_factor: f64,
}

fn power_map_derivative(t: f64, order: usize, exponent: f64, factor: f64) -> f64 {
    if t > 0.0 {
        factor * t.powf(exponent)
    } else if t < 0.0 {
        let sign = if order.is_multiple_of(2) { -1.0 } else { 1.0 };
        sign * factor * (-t).powf(exponent)
    } else {
        0.0
    }
}

/// Samples the `N`-th derivative of `|t|^{p-2} t` on `[-1, 1]` and returns
/// the largest Hölder quotient with exponent `p - 1 - N`.
///
/// `N` is the largest integer strictly below `p - 1`. The sample set mixes a
/// uniform lattice with geometrically clustered points near the origin,
/// which is where the quotient peaks for opposite-sign pairs.
pub fn phi_p_holder_estimate(p: f64, grid_count: usize) -> Result<HolderEstimate> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent { value: p, reason: "power map needs p > 1" });
    }
    if grid_count < 2 {
        return Err(Error::Config("Hölder estimate needs at least two sample points".into()));
    }
    let order = ((p - 1.0).ceil() as usize).saturating_sub(1);
    let exponent = p - 1.0 - order as f64;
    let factor: f64 = (1..=order).map(|k| p - k as f64).product();

    let half = grid_count.div_ceil(2);
    let mut pos: Vec<f64> = (1..=half).map(|k| k as f64 / half as f64).collect();
    pos.extend((1..=half).map(|k| 10f64.powf(-12.0 * k as f64 / half as f64)));
    let mut ts: Vec<f64> = pos.iter().flat_map(|&t| [t, -t]).collect();
    ts.push(0.0);
    ts.sort_by(f64::total_cmp);
    ts.dedup();

    let vals: Vec<f64> = ts.iter().map(|&t| power_map_derivative(t, order, exponent, factor)).collect();
    let mut sup: f64 = 0.0;
    for i in 0..ts.len() {
        for j in (i + 1)..ts.len() {
            let q = (vals[j] - vals[i]).abs() / (ts[j] - ts[i]).powf(exponent);
            sup = sup.max(q);
        }
    }
    Ok(HolderEstimate { order, exponent, constant_estimate: sup, leading_factor: factor })
}
