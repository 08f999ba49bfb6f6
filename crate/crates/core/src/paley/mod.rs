//! Littlewood-Paley decompositions and Triebel-Lizorkin square functions.
//!
//! Three concrete families are provided:
//!
//! * [`LPDecomposition::dyadic_fourier`]: smooth dyadic annuli on the periodic
//!   Fourier lattice;
//! * [`LPDecomposition::neumann_dyadic`]: dyadic shells in the spectrum of the
//!   cell-centred Neumann operator `-Laplace + I` (cosine modes), the setting
//!   in which the order-1/2 square-function space matches `H^1`;
//! * [`LPDecomposition::orthobasis`]: rank-one projections onto an orthonormal
//!   basis, a valid decomposition for exponent 2 only.

mod bump;
pub mod calibration;
pub mod rbound;
mod transform;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::lebesgue::{duality_product, lp_norm, Grid, GridFunction, Scalar};
use crate::{Error, Result};
pub use bump::cutoff;
pub(crate) use transform::{frequency_radius, neumann_eigenvalue, Transform};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecompositionKind {
    FourierDyadic,
    NeumannDyadic,
    Orthobasis,
}

/// Smoothness and integrability of a square-function norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareFunctionParams {
    pub s: f64,
    pub q: f64,
}

impl SquareFunctionParams {
    pub fn new(s: f64, q: f64) -> Result<Self> {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(Error::Domain(format!("smoothness must be >= 0, got {s}")));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(Error::InvalidExponent { value: q, reason: "square-function exponent must lie in (1, inf)" });
        }
        Ok(Self { s, q })
    }
}

/// An ordered family of commuting projections `P_0, ..., P_J` summing to
/// the identity, with `P_j P_k = 0` whenever `|j - k| >= 2`.
#[derive(Debug, Clone)]
pub struct LPDecomposition {
    grid: Grid,
    kind: DecompositionKind,
    transform: Option<Transform>,
    masks: Vec<Vec<f64>>,
    basis: Vec<GridFunction>,
    c_star: Option<f64>,
}

fn dyadic_masks(grid: &Grid, last: usize, radius: impl Fn(usize) -> f64) -> Vec<Vec<f64>> {
    (0..=last).map(|j| (0..grid.len()).map(|i| bump::shell(j, last, radius(i))).collect()).collect()
}

impl LPDecomposition {
    /// Smooth dyadic annuli in the integer frequency radius, truncated at
    /// `J = log2(points / 2)`; the last shell absorbs the lattice corners.
    pub fn dyadic_fourier(grid: &Grid) -> Result<Self> {
        let n = grid.points();
        if n < 4 || !n.is_power_of_two() {
            return Err(Error::Config(format!(
                "dyadic Fourier decomposition needs a power-of-two grid with at least 4 points, got {n}"
            )));
        }
        let last = (n / 2).trailing_zeros() as usize;
        let masks = dyadic_masks(grid, last, |i| frequency_radius(grid, i));
        Ok(Self {
            grid: grid.clone(),
            kind: DecompositionKind::FourierDyadic,
            transform: Some(Transform::fourier(n)),
            masks,
            basis: Vec::new(),
            c_star: None,
        })
    }

    /// Dyadic shells in the eigenvalues `lambda` of the discrete Neumann
    /// operator `-Laplace + I`. Shell `j` lives where `lambda ~ 2^j`, so the
    /// weight `2^{-j}` tracks `1/lambda`.
    pub fn neumann_dyadic(grid: &Grid) -> Result<Self> {
        let n = grid.points();
        if !n.is_power_of_two() {
            return Err(Error::Config(format!("points per axis must be a power of two, got {n}")));
        }
        let lam_max = (0..grid.len()).map(|i| neumann_eigenvalue(grid, i)).fold(1.0, f64::max);
        let last = (lam_max.log2().ceil() as usize).max(1);
        let masks = dyadic_masks(grid, last, |i| neumann_eigenvalue(grid, i));
        Ok(Self {
            grid: grid.clone(),
            kind: DecompositionKind::NeumannDyadic,
            transform: Some(Transform::cosine(n)),
            masks,
            basis: Vec::new(),
            c_star: None,
        })
    }

    /// Rank-one projections `P_j z = (z, e_j) e_j`. The basis must be
    /// orthonormal to 1e-10 and complete.
    pub fn orthobasis(basis: Vec<GridFunction>, grid: &Grid) -> Result<Self> {
        if basis.len() != grid.len() {
            return Err(Error::Validation(format!(
                "basis has {} elements but the grid has {} points",
                basis.len(),
                grid.len()
            )));
        }
        for (j, e) in basis.iter().enumerate() {
            grid.ensure_same(e.grid())?;
            for (k, f) in basis.iter().enumerate().skip(j) {
                let want = if j == k { 1.0 } else { 0.0 };
                let got = duality_product(e, f)?;
                if (got - want).abs() > 1e-10 {
                    return Err(Error::Validation(format!("basis not orthonormal: (e_{j}, e_{k}) = {got}")));
                }
            }
        }
        Ok(Self {
            grid: grid.clone(),
            kind: DecompositionKind::Orthobasis,
            transform: None,
            masks: Vec::new(),
            basis,
            c_star: Some(1.0),
        })
    }

    pub fn kind(&self) -> DecompositionKind {
        self.kind
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Index of the last projection.
    pub fn j_max(&self) -> usize {
        self.len() - 1
    }

    /// Number of projections.
    pub fn len(&self) -> usize {
        match self.kind {
            DecompositionKind::Orthobasis => self.basis.len(),
            _ => self.masks.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Frequency multipliers, one array per projection (empty for an
    /// orthonormal-basis decomposition).
    pub fn masks(&self) -> &[Vec<f64>] {
        &self.masks
    }

    /// Measured norm-equivalence constant, once calibrated.
    pub fn c_star(&self) -> Option<f64> {
        self.c_star
    }

    pub fn set_c_star(&mut self, c: f64) {
        self.c_star = Some(c);
    }

    fn spectrum<T: Scalar>(&self, z: &GridFunction<T>) -> Result<Vec<Complex64>> {
        self.grid.ensure_same(z.grid())?;
        let mut buf: Vec<Complex64> = z.values().iter().map(|v| v.to_complex()).collect();
        if let Some(t) = &self.transform {
            t.forward(&self.grid, &mut buf);
        }
        Ok(buf)
    }

    fn synthesize<T: Scalar>(&self, spec: &[Complex64], mask: impl Fn(usize) -> f64) -> GridFunction<T> {
        let mut buf: Vec<Complex64> = spec.iter().enumerate().map(|(i, v)| v * mask(i)).collect();
        if let Some(t) = &self.transform {
            t.inverse(&self.grid, &mut buf);
        }
        let values = buf.into_iter().map(|v| T::from_parts(v.re, v.im)).collect();
        GridFunction::new(self.grid.clone(), values).expect("length preserved")
    }

    fn basis_projection<T: Scalar>(&self, j: usize, z: &GridFunction<T>) -> Result<GridFunction<T>> {
        let e = &self.basis[j];
        let c = duality_product(z, &e.map(T::from_real))?;
        Ok(e.map(|v| c.scale(v)))
    }

    fn check_index(&self, j: usize) -> Result<()> {
        if j >= self.len() {
            return Err(Error::Index { index: j, max: self.j_max() });
        }
        Ok(())
    }

    /// `P_j z`.
    pub fn project<T: Scalar>(&self, j: usize, z: &GridFunction<T>) -> Result<GridFunction<T>> {
        self.check_index(j)?;
        if self.kind == DecompositionKind::Orthobasis {
            self.grid.ensure_same(z.grid())?;
            return self.basis_projection(j, z);
        }
        let spec = self.spectrum(z)?;
        Ok(self.synthesize(&spec, |i| self.masks[j][i]))
    }

    /// All projections `P_0 z, ..., P_J z`, sharing one forward transform.
    pub fn projections<T: Scalar>(&self, z: &GridFunction<T>) -> Result<Vec<GridFunction<T>>> {
        if self.kind == DecompositionKind::Orthobasis {
            self.grid.ensure_same(z.grid())?;
            return (0..self.len()).map(|j| self.basis_projection(j, z)).collect();
        }
        let spec = self.spectrum(z)?;
        Ok(self.masks.iter().map(|m| self.synthesize(&spec, |i| m[i])).collect())
    }

    /// `sum_j P_j z`.
    pub fn reconstruct<T: Scalar>(&self, z: &GridFunction<T>) -> Result<GridFunction<T>> {
        let parts = self.projections(z)?;
        let mut acc = GridFunction::zeros(&self.grid);
        for p in &parts {
            acc = &acc + p;
        }
        Ok(acc)
    }

    /// `|| (sum_j 2^{2 j s} |P_j z|^2)^{1/2} ||_q` for any real `s`.
    pub fn square_function_norm<T: Scalar>(&self, z: &GridFunction<T>, s: f64, q: f64) -> Result<f64> {
        let parts = self.projections(z)?;
        let mut acc = vec![0.0; self.grid.len()];
        for (j, part) in parts.iter().enumerate() {
            let w = 2f64.powf(2.0 * j as f64 * s);
            for (a, v) in acc.iter_mut().zip(part.values()) {
                *a += w * v.modulus().powi(2);
            }
        }
        let sf = GridFunction::new(self.grid.clone(), acc.into_iter().map(f64::sqrt).collect())?;
        lp_norm(&sf, q)
    }

    /// Triebel-Lizorkin norm of smoothness `s` and integrability `q`.
    pub fn tl_norm<T: Scalar>(&self, z: &GridFunction<T>, params: &SquareFunctionParams) -> Result<f64> {
        self.square_function_norm(z, params.s, params.q)
    }

    /// Negative-order square-function norm `|| (sum 2^{-2 j theta} |P_j f|^2)^{1/2} ||_p`,
    /// the computable stand-in for the dual of the order-`theta` space.
    pub fn tl_dual_norm<T: Scalar>(&self, f: &GridFunction<T>, theta: f64, p: f64) -> Result<f64> {
        if !(theta >= 0.0) {
            return Err(Error::Domain(format!("theta must be >= 0, got {theta}")));
        }
        self.square_function_norm(f, -theta, p)
    }

    /// `sum_{k <= floor(lambda)} P_k z`.
    pub fn low_pass<T: Scalar>(&self, lambda: f64, z: &GridFunction<T>) -> Result<GridFunction<T>> {
        if !(lambda >= 1.0) {
            return Err(Error::Domain(format!("band split needs lambda >= 1, got {lambda}")));
        }
        let top = (lambda.floor() as usize).min(self.j_max());
        if self.kind == DecompositionKind::Orthobasis {
            let mut acc = GridFunction::zeros(&self.grid);
            for j in 0..=top {
                acc = &acc + &self.project(j, z)?;
            }
            return Ok(acc);
        }
        let spec = self.spectrum(z)?;
        Ok(self.synthesize(&spec, |i| self.masks[..=top].iter().map(|m| m[i]).sum()))
    }

    /// `z - low_pass(lambda, z)`.
    pub fn high_pass<T: Scalar>(&self, lambda: f64, z: &GridFunction<T>) -> Result<GridFunction<T>> {
        let low = self.low_pass(lambda, z)?;
        Ok(z - &low)
    }
}
