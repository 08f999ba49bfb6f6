use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Field of values a [`GridFunction`] can carry.
pub trait Scalar:
    Copy
    + Debug
    + Default
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    const IS_COMPLEX: bool;

    fn modulus(self) -> f64;
    fn conj(self) -> Self;
    fn from_real(x: f64) -> Self;
    fn from_parts(re: f64, im: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn scale(self, s: f64) -> Self;

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.re(), self.im())
    }
}

impl Scalar for f64 {
    const IS_COMPLEX: bool = false;

    fn modulus(self) -> f64 {
        self.abs()
    }
    fn conj(self) -> Self {
        self
    }
    fn from_real(x: f64) -> Self {
        x
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Complex64 {
    const IS_COMPLEX: bool = true;

    fn modulus(self) -> f64 {
        self.norm()
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn from_real(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

/// Uniform cell-centred grid on `[0, L_1]` or `[0, L_1] x [0, L_2]`.
///
/// Sample `i` sits at the midpoint of its cell, so integrals are midpoint
/// sums weighted by [`Grid::cell_measure`]. Points per axis must be a power
/// of two so that dyadic frequency shells line up with the discrete lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    points: usize,
    lengths: [f64; 2],
}

impl Grid {
    pub fn new(dim: usize, points: usize, lengths: &[f64]) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::Config(format!("grid dimension must be 1 or 2, got {dim}")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(Error::Config(format!("points per axis must be a power of two >= 2, got {points}")));
        }
        if lengths.len() != dim {
            return Err(Error::Config(format!("expected {dim} axis lengths, got {}", lengths.len())));
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::Config(format!("axis lengths must be positive, got {lengths:?}")));
        }
        let mut l = [1.0; 2];
        l[..dim].copy_from_slice(lengths);
        Ok(Self { dim, points, lengths: l })
    }

    pub fn unit_interval(points: usize) -> Result<Self> {
        Self::new(1, points, &[1.0])
    }

    pub fn unit_square(points: usize) -> Result<Self> {
        Self::new(2, points, &[1.0, 1.0])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Points per axis.
    pub fn points(&self) -> usize {
        self.points
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths[..self.dim]
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        self.lengths[axis] / self.points as f64
    }

    pub fn cell_measure(&self) -> f64 {
        (0..self.dim).map(|a| self.spacing(a)).product()
    }

    pub fn total_measure(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Total number of samples.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Flat index of `(ix, iy)`; `iy` is ignored in one dimension.
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        if self.dim == 1 {
            ix
        } else {
            iy * self.points + ix
        }
    }

    /// Inverse of [`Grid::index`].
    pub fn multi_index(&self, idx: usize) -> (usize, usize) {
        if self.dim == 1 {
            (idx, 0)
        } else {
            (idx % self.points, idx / self.points)
        }
    }

    /// Cell-centre coordinates of sample `idx`. The second entry is zero in
    /// one dimension.
    pub fn point(&self, idx: usize) -> [f64; 2] {
        let (ix, iy) = self.multi_index(idx);
        let x = (ix as f64 + 0.5) * self.spacing(0);
        let y = if self.dim == 2 { (iy as f64 + 0.5) * self.spacing(1) } else { 0.0 };
        [x, y]
    }

    /// Index of the cell containing `x` (points on the boundary snap inward).
    pub fn locate(&self, x: [f64; 2]) -> Result<usize> {
        let mut ij = [0usize; 2];
        for axis in 0..self.dim {
            let v = x[axis];
            if !(0.0..=self.lengths[axis]).contains(&v) {
                return Err(Error::Domain(format!("point {x:?} lies outside the grid domain")));
            }
            ij[axis] = ((v / self.spacing(axis)).floor() as usize).min(self.points - 1);
        }
        Ok(self.index(ij[0], ij[1]))
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self != other {
            return Err(Error::Shape(format!("grids differ: {self:?} vs {other:?}")));
        }
        Ok(())
    }
}

/// Function sampled on a [`Grid`], one value per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T: Scalar = f64> {
    grid: Grid,
    values: Vec<T>,
}

impl<T: Scalar> GridFunction<T> {
    pub fn new(grid: Grid, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!("grid has {} points but {} values were given", grid.len(), values.len())));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: &Grid) -> Self {
        Self { grid: grid.clone(), values: vec![T::default(); grid.len()] }
    }

    pub fn constant(grid: &Grid, c: T) -> Self {
        Self { grid: grid.clone(), values: vec![c; grid.len()] }
    }

    /// Samples `f` at the cell centres.
    pub fn from_fn(grid: &Grid, mut f: impl FnMut([f64; 2]) -> T) -> Self {
        let values = (0..grid.len()).map(|i| f(grid.point(i))).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [T] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> GridFunction<U> {
        GridFunction { grid: self.grid.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn zip_with<U: Scalar>(&self, other: &GridFunction<T>, f: impl Fn(T, T) -> U) -> Result<GridFunction<U>> {
        self.grid.ensure_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Ok(GridFunction { grid: self.grid.clone(), values })
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &GridFunction<T>) -> Result<Self> {
        self.zip_with(other, |a, b| a + b.scale(s))
    }

    pub fn to_complex(&self) -> GridFunction<Complex64> {
        self.map(|v| v.to_complex())
    }

    pub fn real_part(&self) -> GridFunction<f64> {
        self.map(|v| v.re())
    }

    pub fn max_modulus(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.modulus()))
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == T::default())
    }
}

impl<T: Scalar> Add for &GridFunction<T> {
    type Output = GridFunction<T>;

    /// Panics when the grids differ.
    fn add(self, rhs: Self) -> GridFunction<T> {
        self.zip_with(rhs, |a, b| a + b).expect("grid mismatch in addition")
    }
}

impl<T: Scalar> Sub for &GridFunction<T> {
    type Output = GridFunction<T>;

    /// Panics when the grids differ.
    fn sub(self, rhs: Self) -> GridFunction<T> {
        self.zip_with(rhs, |a, b| a - b).expect("grid mismatch in subtraction")
    }
}

impl<T: Scalar> Neg for &GridFunction<T> {
    type Output = GridFunction<T>;

    fn neg(self) -> GridFunction<T> {
        self.map(|v| -v)
    }
}

impl<T: Scalar> Mul<f64> for &GridFunction<T> {
    type Output = GridFunction<T>;

    fn mul(self, s: f64) -> GridFunction<T> {
        self.scaled(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert!(Grid::unit_interval(12).is_err());
        assert!(Grid::new(3, 8, &[1.0, 1.0, 1.0]).is_err());
        assert!(Grid::new(2, 8, &[1.0]).is_err());
        assert!(Grid::new(1, 8, &[0.0]).is_err());
    }

    #[test]
    fn measures() {
        let g = Grid::new(2, 8, &[2.0, 0.5]).unwrap();
        assert_eq!(g.len(), 64);
        assert!((g.cell_measure() * g.len() as f64 - g.total_measure()).abs() < 1e-15);
        assert_eq!(g.point(g.index(0, 0)), [0.125, 0.03125]);
    }

    #[test]
    fn locate_snaps_boundary_inward() {
        let g = Grid::unit_square(4).unwrap();
        assert_eq!(g.locate([1.0, 1.0]).unwrap(), g.index(3, 3));
        assert_eq!(g.locate([0.3, 0.6]).unwrap(), g.index(1, 2));
        assert!(g.locate([1.1, 0.0]).is_err());
    }

    #[test]
    fn value_count_must_match() {
        let g = Grid::unit_interval(4).unwrap();
        assert!(GridFunction::new(g, vec![1.0; 3]).is_err());
    }
}
