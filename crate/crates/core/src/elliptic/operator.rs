use crate::lebesgue::{Grid, GridFunction};
use crate::{Error, Result};

use super::field::DiffusionField;

/// Symmetric banded matrix of the cell-centred finite-volume discretisation
/// of `-div(kappa grad .) + a` with natural boundary closure.
///
/// Rows are in load-density form: `(A u)_i` approximates the right-hand side
/// density at cell `i`. Only the lower band is stored.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    grid: Grid,
    bandwidth: usize,
    /// `band[i * (bandwidth + 1) + k] = A[i][i - k]`.
    band: Vec<f64>,
    /// Banded Cholesky factor in the same layout; `None` when singular.
    factor: Option<Vec<f64>>,
}

/// Harmonic mean, the flux-continuous face value across a coefficient jump.
fn harmonic(a: f64, b: f64) -> f64 {
    2.0 * a * b / (a + b)
}

/// Builds the operator for diffusion `kappa` and reaction `a`.
///
/// The pure Neumann case `a == 0` is assembled (its rows sum to zero) but not
/// factorised; solving with it fails with [`Error::Singular`].
pub fn assemble(kappa: &DiffusionField, a: &GridFunction) -> Result<DiscreteOperator> {
    let grid = kappa.grid();
    grid.ensure_same(a.grid())?;
    if let Some(i) = kappa.values().iter().position(|&k| !(k > 0.0 && k.is_finite())) {
        return Err(Error::Validation(format!(
            "diffusion coefficient must be positive, cell {i} has {}",
            kappa.values()[i]
        )));
    }
    if let Some(i) = a.values().iter().position(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::Validation(format!(
            "reaction coefficient must be nonnegative, cell {i} has {}",
            a.values()[i]
        )));
    }
    let n = grid.points();
    let bandwidth = if grid.dim() == 1 { 1 } else { n };
    let w = bandwidth + 1;
    let mut band = vec![0.0; grid.len() * w];
    let k = kappa.values();
    let mut couple = |i: usize, j: usize, h: f64| {
        let c = harmonic(k[i], k[j]) / (h * h);
        let (hi, lo) = if i > j { (i, j) } else { (j, i) };
        band[i * w] += c;
        band[j * w] += c;
        band[hi * w + (hi - lo)] -= c;
    };
    for idx in 0..grid.len() {
        let (ix, iy) = grid.multi_index(idx);
        if ix + 1 < n {
            couple(idx, grid.index(ix + 1, iy), grid.spacing(0));
        }
        if grid.dim() == 2 && iy + 1 < n {
            couple(idx, grid.index(ix, iy + 1), grid.spacing(1));
        }
    }
    for (idx, &v) in a.values().iter().enumerate() {
        band[idx * w] += v;
    }
    let mut op = DiscreteOperator { grid: grid.clone(), bandwidth, band, factor: None };
    if a.values().iter().any(|&v| v > 0.0) {
        op.factor = Some(op.cholesky()?);
    }
    Ok(op)
}

impl DiscreteOperator {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn is_singular(&self) -> bool {
        self.factor.is_none()
    }

    /// Entry `A[i][j]` (zero outside the band).
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        if hi - lo > self.bandwidth {
            0.0
        } else {
            self.band[hi * (self.bandwidth + 1) + (hi - lo)]
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let w = self.bandwidth + 1;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] += self.band[i * w] * x[i];
            for k in 1..w.min(i + 1) {
                let v = self.band[i * w + k];
                y[i] += v * x[i - k];
                y[i - k] += v * x[i];
            }
        }
        y
    }

    fn cholesky(&self) -> Result<Vec<f64>> {
        let n = self.dim();
        let b = self.bandwidth;
        let w = b + 1;
        let mut l = vec![0.0; n * w];
        for i in 0..n {
            let start = i.saturating_sub(b);
            for k in start..=i {
                let mut sum = self.band[i * w + (i - k)];
                for m in start.max(k.saturating_sub(b))..k {
                    sum -= l[i * w + (i - m)] * l[k * w + (k - m)];
                }
                if k == i {
                    if !(sum > 0.0) {
                        return Err(Error::Singular(format!("nonpositive pivot {sum:e} at row {i}")));
                    }
                    l[i * w] = sum.sqrt();
                } else {
                    l[i * w + (i - k)] = sum / l[k * w];
                }
            }
        }
        Ok(l)
    }

    fn substitute(&self, l: &[f64], rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let b = self.bandwidth;
        let w = b + 1;
        let mut y = rhs.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for j in i.saturating_sub(b)..i {
                s -= l[i * w + (i - j)] * y[j];
            }
            y[i] = s / l[i * w];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for j in (i + 1)..(i + w).min(n) {
                s -= l[j * w + (j - i)] * y[j];
            }
            y[i] = s / l[i * w];
        }
        y
    }

    /// Solves `A x = rhs` by Cholesky with one step of iterative refinement.
    /// Returns `(x, relative residual, solves performed)`.
    pub fn solve_system(&self, rhs: &[f64]) -> Result<(Vec<f64>, f64, usize)> {
        if rhs.len() != self.dim() {
            return Err(Error::Shape(format!("right-hand side has {} entries, operator {}", rhs.len(), self.dim())));
        }
        let l = self.factor.as_ref().ok_or_else(|| {
            Error::Singular("pure Neumann operator without reaction term has constants in its kernel".into())
        })?;
        let norm_b = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm_b == 0.0 {
            return Ok((vec![0.0; rhs.len()], 0.0, 0));
        }
        let mut x = self.substitute(l, rhs);
        let r: Vec<f64> = rhs.iter().zip(self.apply(&x)).map(|(b, ax)| b - ax).collect();
        let d = self.substitute(l, &r);
        x.iter_mut().zip(d).for_each(|(xi, di)| *xi += di);
        let res = rhs.iter().zip(self.apply(&x)).map(|(b, ax)| (b - ax).powi(2)).sum::<f64>().sqrt();
        Ok((x, res / norm_b, 2))
    }

    /// Solves with a grid-function right-hand side.
    pub fn solve_function(&self, rhs: &GridFunction) -> Result<GridFunction> {
        self.grid.ensure_same(rhs.grid())?;
        let (x, _, _) = self.solve_system(rhs.values())?;
        GridFunction::new(self.grid.clone(), x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn banded_solve_matches_apply() {
        let g = Grid::unit_square(8).unwrap();
        let kappa = DiffusionField::constant(&g, 2.0).unwrap();
        let a = GridFunction::from_fn(&g, |x| 1.0 + x[0]);
        let op = assemble(&kappa, &a).unwrap();
        let x: Vec<f64> = (0..g.len()).map(|i| (i as f64 * 0.7).sin()).collect();
        let b = op.apply(&x);
        let (y, res, _) = op.solve_system(&b).unwrap();
        assert!(res < 1e-14);
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_neumann_is_singular() {
        let g = Grid::unit_interval(8).unwrap();
        let op = assemble(&DiffusionField::constant(&g, 1.0).unwrap(), &GridFunction::zeros(&g)).unwrap();
        assert!(op.is_singular());
        assert!(matches!(op.solve_system(&[1.0; 8]), Err(Error::Singular(_))));
    }
}
