use serde::{Deserialize, Serialize};

use crate::lebesgue::{lp_norm, Grid, GridFunction};
use crate::{Error, Result};

/// Axis-aligned rectangle `[x0, x1] x [y0, y1]` carrying a constant value.
/// In one dimension `y` is ignored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: [f64; 2],
    #[serde(default = "unit_range")]
    pub y: [f64; 2],
    pub value: f64,
}

fn unit_range() -> [f64; 2] {
    [0.0, 1.0]
}

impl Region {
    fn contains(&self, p: [f64; 2], dim: usize) -> bool {
        let inside = |v: f64, r: [f64; 2]| v >= r[0] && v <= r[1];
        inside(p[0], self.x) && (dim == 1 || inside(p[1], self.y))
    }
}

/// Piecewise diffusion coefficient with per-cell subdomain labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionField {
    grid: Grid,
    values: Vec<f64>,
    labels: Vec<u32>,
}

impl DiffusionField {
    pub fn new(grid: &Grid, values: Vec<f64>, labels: Vec<u32>) -> Result<Self> {
        if values.len() != grid.len() || labels.len() != grid.len() {
            return Err(Error::Shape(format!(
                "diffusion field needs {} values and labels, got {} and {}",
                grid.len(),
                values.len(),
                labels.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::Validation(format!("diffusion coefficient must be positive, got {v}")));
        }
        Ok(Self { grid: grid.clone(), values, labels })
    }

    pub fn constant(grid: &Grid, value: f64) -> Result<Self> {
        Self::new(grid, vec![value; grid.len()], vec![0; grid.len()])
    }

    /// `background` everywhere, overridden by `regions` (later ones win).
    /// Cells whose centre lies in region `r` get label `r + 1`.
    pub fn piecewise(grid: &Grid, background: f64, regions: &[Region]) -> Result<Self> {
        let mut values = vec![background; grid.len()];
        let mut labels = vec![0; grid.len()];
        for idx in 0..grid.len() {
            let p = grid.point(idx);
            for (r, reg) in regions.iter().enumerate() {
                if reg.contains(p, grid.dim()) {
                    values[idx] = reg.value;
                    labels[idx] = r as u32 + 1;
                }
            }
        }
        Self::new(grid, values, labels)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Checks `lower <= kappa <= upper` with `0 < lower < upper`.
    pub fn check_bounds(&self, lower: f64, upper: f64) -> Result<()> {
        if !(lower > 0.0 && lower < upper) {
            return Err(Error::Config(format!("ellipticity bounds need 0 < lower < upper, got {lower}, {upper}")));
        }
        if let Some(v) = self.values.iter().find(|v| !(**v >= lower && **v <= upper)) {
            return Err(Error::Validation(format!("diffusion value {v} outside [{lower}, {upper}]")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub location: [f64; 2],
    pub weight: f64,
}

/// Signed measure data: point masses, an optional interior density and a
/// density on boundary faces.
///
/// Boundary faces are ordered left, right in one dimension and bottom, top,
/// left, right (each along its axis) in two, so there are 2 or `4 n` of them.
/// An empty list means zero boundary data.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MeasureData {
    pub interior_masses: Vec<PointMass>,
    pub interior_density: Option<GridFunction>,
    pub boundary_density: Vec<f64>,
}

/// Number of boundary faces of `grid`.
pub fn boundary_face_count(grid: &Grid) -> usize {
    if grid.dim() == 1 {
        2
    } else {
        4 * grid.points()
    }
}

/// `(cell, face length)` of every boundary face, in the documented order.
fn boundary_faces(grid: &Grid) -> Vec<(usize, f64)> {
    let n = grid.points();
    if grid.dim() == 1 {
        return vec![(0, 1.0), (n - 1, 1.0)];
    }
    let (hx, hy) = (grid.spacing(0), grid.spacing(1));
    let mut faces = Vec::with_capacity(4 * n);
    faces.extend((0..n).map(|i| (grid.index(i, 0), hx)));
    faces.extend((0..n).map(|i| (grid.index(i, n - 1), hx)));
    faces.extend((0..n).map(|j| (grid.index(0, j), hy)));
    faces.extend((0..n).map(|j| (grid.index(n - 1, j), hy)));
    faces
}

impl MeasureData {
    pub fn point(location: [f64; 2], weight: f64) -> Self {
        Self { interior_masses: vec![PointMass { location, weight }], ..Self::default() }
    }

    /// The same density `g` on every boundary face.
    pub fn uniform_boundary(grid: &Grid, g: f64) -> Vec<f64> {
        vec![g; boundary_face_count(grid)]
    }

    fn check(&self, grid: &Grid) -> Result<()> {
        if !self.boundary_density.is_empty() && self.boundary_density.len() != boundary_face_count(grid) {
            return Err(Error::Shape(format!(
                "boundary density needs {} face values, got {}",
                boundary_face_count(grid),
                self.boundary_density.len()
            )));
        }
        if let Some(f) = &self.interior_density {
            grid.ensure_same(f.grid())?;
        }
        Ok(())
    }

    /// Load density per cell: point masses as `weight / cell_measure` in the
    /// containing cell, boundary data as `g * face_length / cell_measure`.
    pub fn load(&self, grid: &Grid) -> Result<GridFunction> {
        self.check(grid)?;
        let m = grid.cell_measure();
        let mut rhs = match &self.interior_density {
            Some(f) => f.values().to_vec(),
            None => vec![0.0; grid.len()],
        };
        for pm in &self.interior_masses {
            rhs[grid.locate(pm.location)?] += pm.weight / m;
        }
        for (&g, (cell, len)) in self.boundary_density.iter().zip(boundary_faces(grid)) {
            rhs[cell] += g * len / m;
        }
        GridFunction::new(grid.clone(), rhs)
    }

    /// Total variation of the combined measure on the closed domain.
    pub fn total_variation(&self, grid: &Grid) -> Result<f64> {
        self.check(grid)?;
        let mut tv: f64 = self.interior_masses.iter().map(|pm| pm.weight.abs()).sum();
        if let Some(f) = &self.interior_density {
            tv += lp_norm(f, 1.0)?;
        }
        tv += self.boundary_density.iter().zip(boundary_faces(grid)).map(|(g, (_, len))| g.abs() * len).sum::<f64>();
        Ok(tv)
    }
}

/// Admissible coefficients: `||a||_{p_frak} <= M` and `a >= a_lower`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSet {
    pub p_frak: f64,
    #[serde(rename = "M")]
    pub norm_bound: f64,
    pub a_lower: f64,
}

impl FeasibleSet {
    /// `dim` is the spatial dimension; `p_frak` must exceed `dim / 2`.
    pub fn new(p_frak: f64, norm_bound: f64, a_lower: f64, dim: usize) -> Result<Self> {
        let set = Self { p_frak, norm_bound, a_lower };
        set.validate(dim)?;
        Ok(set)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.p_frak > dim as f64 / 2.0 && self.p_frak >= 1.0) {
            return Err(Error::InvalidExponent { value: self.p_frak, reason: "p_frak must exceed half the dimension" });
        }
        if !(self.a_lower > 0.0) {
            return Err(Error::Config(format!("lower bound must be positive, got {}", self.a_lower)));
        }
        if !(self.norm_bound > 0.0 && self.norm_bound.is_finite()) {
            return Err(Error::Config(format!("norm bound M must be positive, got {}", self.norm_bound)));
        }
        Ok(())
    }

    fn check_nonempty(&self, grid: &Grid) -> Result<()> {
        let floor = self.a_lower * grid.total_measure().powf(1.0 / self.p_frak);
        if floor > self.norm_bound {
            return Err(Error::Config(format!(
                "feasible set is empty: the lower bound alone has norm {floor} > M = {}",
                self.norm_bound
            )));
        }
        Ok(())
    }

    pub fn contains(&self, a: &GridFunction) -> Result<bool> {
        Ok(a.values().iter().all(|&v| v >= self.a_lower) && lp_norm(a, self.p_frak)? <= self.norm_bound)
    }
}

/// Clips below at `a_lower`, then shrinks toward `a_lower` along the segment
/// `a_lower + t (a - a_lower)` until the norm bound holds. The shrink factor
/// comes from bisection and errs on the feasible side.
pub fn project_feasible(a: &GridFunction, set: &FeasibleSet) -> Result<GridFunction> {
    set.check_nonempty(a.grid())?;
    let lo = set.a_lower;
    let clipped = a.map(|v| if v >= lo { v } else { lo });
    if lp_norm(&clipped, set.p_frak)? <= set.norm_bound {
        return Ok(clipped);
    }
    let along = |t: f64| clipped.map(|v| lo + t * (v - lo));
    let excess = |t: f64| -> Result<f64> { Ok(lp_norm(&along(t), set.p_frak)? - set.norm_bound) };
    let (mut t_lo, mut t_hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (t_lo + t_hi);
        if mid <= t_lo || mid >= t_hi {
            break;
        }
        if excess(mid)? <= 0.0 {
            t_lo = mid;
        } else {
            t_hi = mid;
        }
    }
    Ok(along(t_lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_examples() {
        let g = Grid::unit_square(8).unwrap();
        let set = FeasibleSet::new(3.0, 4.0, 0.5, 2).unwrap();
        let ok = GridFunction::from_fn(&g, |x| 1.0 + x[0]);
        assert_eq!(project_feasible(&ok, &set).unwrap(), ok);
        let low = GridFunction::constant(&g, -0.5);
        assert_eq!(project_feasible(&low, &set).unwrap(), GridFunction::constant(&g, 0.5));
        let big = GridFunction::constant(&g, 50.0);
        let pr = project_feasible(&big, &set).unwrap();
        assert!((lp_norm(&pr, 3.0).unwrap() - 4.0).abs() < 1e-10);
        assert!(set.contains(&pr).unwrap());
        let empty = FeasibleSet::new(3.0, 0.1, 0.5, 2).unwrap();
        assert!(matches!(project_feasible(&big, &empty), Err(Error::Config(_))));
    }

    #[test]
    fn loads_point_masses_per_cell_measure() {
        let g = Grid::unit_square(4).unwrap();
        let mu = MeasureData::point([0.3, 0.6], 2.0);
        let load = mu.load(&g).unwrap();
        assert_eq!(load.values()[g.index(1, 2)], 2.0 * 16.0);
        assert_eq!(mu.total_variation(&g).unwrap(), 2.0);
        let b = MeasureData { boundary_density: MeasureData::uniform_boundary(&g, 1.0), ..Default::default() };
        assert!((b.total_variation(&g).unwrap() - 4.0).abs() < 1e-14);
        assert!((lp_norm(&b.load(&g).unwrap(), 1.0).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn piecewise_labels() {
        let g = Grid::unit_square(4).unwrap();
        let reg = Region { x: [0.5, 1.0], y: [0.0, 1.0], value: 10.0 };
        let k = DiffusionField::piecewise(&g, 1.0, &[reg]).unwrap();
        assert_eq!(k.values()[g.index(3, 0)], 10.0);
        assert_eq!(k.labels()[g.index(0, 0)], 0);
        assert!(k.check_bounds(1.0, 10.0).is_ok());
        assert!(k.check_bounds(2.0, 10.0).is_err());
    }
}
