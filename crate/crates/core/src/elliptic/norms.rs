use serde::{Deserialize, Serialize};

use crate::lebesgue::{lp_norm, Grid, GridFunction};
use crate::paley::{neumann_eigenvalue, LPDecomposition, Transform};
use crate::{Complex64, Error, Result};

/// Forward difference along `axis`; zero on the last layer (Neumann closure).
fn forward_difference(u: &GridFunction, axis: usize) -> Vec<f64> {
    let g = u.grid();
    let n = g.points();
    let h = g.spacing(axis);
    let v = u.values();
    (0..g.len())
        .map(|idx| {
            let (ix, iy) = g.multi_index(idx);
            let along = if axis == 0 { ix } else { iy };
            if along + 1 >= n {
                return 0.0;
            }
            let next = if axis == 0 { g.index(ix + 1, iy) } else { g.index(ix, iy + 1) };
            (v[next] - v[idx]) / h
        })
        .collect()
}

/// Centred second difference along `axis` with reflected ghost cells.
fn second_difference(u: &GridFunction, axis: usize) -> Vec<f64> {
    let g = u.grid();
    let n = g.points();
    let h = g.spacing(axis);
    let v = u.values();
    (0..g.len())
        .map(|idx| {
            let (ix, iy) = g.multi_index(idx);
            let at = |k: usize| if axis == 0 { g.index(k, iy) } else { g.index(ix, k) };
            let i = if axis == 0 { ix } else { iy };
            let prev = v[at(i.saturating_sub(1))];
            let next = v[at((i + 1).min(n - 1))];
            (next - 2.0 * v[idx] + prev) / (h * h)
        })
        .collect()
}

fn mixed_difference(u: &GridFunction) -> Vec<f64> {
    let g = u.grid();
    let n = g.points();
    let (hx, hy) = (g.spacing(0), g.spacing(1));
    let v = u.values();
    (0..g.len())
        .map(|idx| {
            let (ix, iy) = g.multi_index(idx);
            if ix + 1 >= n || iy + 1 >= n {
                return 0.0;
            }
            (v[g.index(ix + 1, iy + 1)] - v[g.index(ix + 1, iy)] - v[g.index(ix, iy + 1)] + v[idx]) / (hx * hy)
        })
        .collect()
}

fn pointwise_norm_power(grid: &Grid, parts: &[Vec<f64>], tau: f64) -> Result<f64> {
    let mag: Vec<f64> = (0..grid.len()).map(|i| parts.iter().map(|p| p[i] * p[i]).sum::<f64>().sqrt()).collect();
    Ok(lp_norm(&GridFunction::new(grid.clone(), mag)?, tau)?.powf(tau))
}

/// Discrete Sobolev norm of integer order 0, 1 or 2 with integrability `tau`.
///
/// Order 1 adds the `tau`-norm of the forward-difference gradient, order 2
/// additionally that of the second-difference Hessian; the pieces are summed
/// as `tau`-th powers.
pub fn sobolev_norm(u: &GridFunction, order: u8, tau: f64) -> Result<f64> {
    if !(tau > 1.0 && tau.is_finite()) {
        return Err(Error::InvalidExponent { value: tau, reason: "Sobolev integrability must lie in (1, inf)" });
    }
    if order > 2 {
        return Err(Error::Domain(format!("Sobolev order must be 0, 1 or 2, got {order}")));
    }
    let g = u.grid();
    let base = lp_norm(u, tau)?;
    if order == 0 || base == 0.0 && u.is_zero() {
        return Ok(base);
    }
    let mut total = base.powf(tau);
    let grad: Vec<Vec<f64>> = (0..g.dim()).map(|a| forward_difference(u, a)).collect();
    total += pointwise_norm_power(g, &grad, tau)?;
    if order == 2 {
        let mut hess: Vec<Vec<f64>> = (0..g.dim()).map(|a| second_difference(u, a)).collect();
        if g.dim() == 2 {
            // The mixed entry appears twice in the Frobenius norm.
            hess.push(mixed_difference(u).into_iter().map(|v| v * std::f64::consts::SQRT_2).collect());
        }
        total += pointwise_norm_power(g, &hess, tau)?;
    }
    Ok(total.powf(1.0 / tau))
}

/// `-Laplace_N u` for the unit-coefficient cell-centred Neumann Laplacian,
/// i.e. the adjoint of the forward-difference gradient applied to it.
pub(crate) fn neumann_laplacian(u: &GridFunction) -> GridFunction {
    let g = u.grid();
    let mut out = vec![0.0; g.len()];
    for axis in 0..g.dim() {
        let h = g.spacing(axis);
        let d = forward_difference(u, axis);
        for idx in 0..g.len() {
            let (ix, iy) = g.multi_index(idx);
            let i = if axis == 0 { ix } else { iy };
            // D^T d at idx: flux in minus flux out.
            out[idx] -= d[idx] / h;
            if i > 0 {
                let prev = if axis == 0 { g.index(ix - 1, iy) } else { g.index(ix, iy - 1) };
                out[idx] += d[prev] / h;
            }
        }
    }
    GridFunction::new(g.clone(), out).expect("length preserved")
}

/// Discrete `(H^1_q)*` norm, computed as the order-1/2 dual square-function
/// norm of the Neumann dyadic decomposition with integrability `q/(q-1)`.
#[derive(Debug, Clone)]
pub struct DualH1Norm {
    decomposition: LPDecomposition,
    exponent: f64,
}

impl DualH1Norm {
    pub fn new(grid: &Grid, q: f64) -> Result<Self> {
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidExponent { value: q, reason: "q must lie in (1, inf)" });
        }
        Ok(Self { decomposition: LPDecomposition::neumann_dyadic(grid)?, exponent: q / (q - 1.0) })
    }

    pub fn eval(&self, v: &GridFunction) -> Result<f64> {
        self.decomposition.tl_dual_norm(v, 0.5, self.exponent)
    }
}

pub fn dual_h1q_norm(v: &GridFunction, q: f64) -> Result<f64> {
    DualH1Norm::new(v.grid(), q)?.eval(v)
}

/// Exact Hilbert-space dual norm `||(-Laplace_N + I)^{-1/2} v||_2` via the
/// cosine eigenbasis.
pub fn spectral_dual_h1_norm(v: &GridFunction) -> Result<f64> {
    let g = v.grid();
    let mut buf: Vec<Complex64> = v.values().iter().map(|&x| Complex64::new(x, 0.0)).collect();
    Transform::cosine(g.points()).forward(g, &mut buf);
    let s: f64 = buf.iter().enumerate().map(|(i, c)| c.norm_sqr() / neumann_eigenvalue(g, i)).sum();
    Ok((s * g.cell_measure()).sqrt())
}

/// The data space of the inverse problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DataNorm {
    L2,
    Lebesgue {
        tau: f64,
    },
    /// Discrete `H^1_tau`; only `tau = 2` has a gradient implementation.
    Sobolev {
        tau: f64,
    },
}

impl DataNorm {
    pub fn validate(&self) -> Result<()> {
        match *self {
            DataNorm::L2 => Ok(()),
            DataNorm::Lebesgue { tau } if tau > 1.0 && tau.is_finite() => Ok(()),
            DataNorm::Lebesgue { tau } => {
                Err(Error::UnsupportedNorm(format!("L^{tau} data norm needs tau in (1, inf)")))
            }
            DataNorm::Sobolev { tau: 2.0 } => Ok(()),
            DataNorm::Sobolev { tau } => {
                Err(Error::UnsupportedNorm(format!("H^1_{tau} data norm: only tau = 2 is supported")))
            }
        }
    }

    pub fn norm(&self, e: &GridFunction) -> Result<f64> {
        self.validate()?;
        match *self {
            DataNorm::L2 => lp_norm(e, 2.0),
            DataNorm::Lebesgue { tau } => lp_norm(e, tau),
            DataNorm::Sobolev { tau } => sobolev_norm(e, 1, tau),
        }
    }

    /// `(1/ell) ||e||^ell`.
    pub fn fidelity(&self, e: &GridFunction, ell: f64) -> Result<f64> {
        Ok(self.norm(e)?.powf(ell) / ell)
    }

    /// Density `r` with `d/dt fidelity(e + t v)|_0 = sum r_i v_i * cell_measure`.
    pub fn fidelity_derivative(&self, e: &GridFunction, ell: f64) -> Result<GridFunction> {
        if !(ell > 1.0) {
            return Err(Error::Domain(format!("fidelity power must exceed 1, got {ell}")));
        }
        let n = self.norm(e)?;
        if n == 0.0 {
            return Ok(GridFunction::zeros(e.grid()));
        }
        Ok(match *self {
            DataNorm::L2 => e.scaled(n.powf(ell - 2.0)),
            DataNorm::Lebesgue { tau } => {
                let w = n.powf(ell - tau);
                e.map(|v| if v == 0.0 { 0.0 } else { w * v.abs().powf(tau - 1.0) * v.signum() })
            }
            DataNorm::Sobolev { .. } => (e + &neumann_laplacian(e)).scaled(n.powf(ell - 2.0)),
        })
    }
}
