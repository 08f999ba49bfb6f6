use serde::{Deserialize, Serialize};

use super::field::{DiffusionField, FeasibleSet, MeasureData, PointMass, Region};
use super::norms::{sobolev_norm, DataNorm};
use super::operator::{assemble, DiscreteOperator};
use crate::lebesgue::{Grid, GridFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EllipticSolution {
    pub u: GridFunction,
    /// `||b - A u|| / ||b||` of the discrete system.
    pub residual_norm: f64,
    pub solver_iterations: usize,
}

impl EllipticSolution {
    /// `||u||_{H^1_tau} / ||mu||_TV`, the constant realised in the a-priori
    /// bound for this solve.
    pub fn apriori_ratio(&self, mu: &MeasureData, tau: f64) -> Result<f64> {
        let tv = mu.total_variation(self.u.grid())?;
        if tv == 0.0 {
            return Ok(0.0);
        }
        Ok(sobolev_norm(&self.u, 1, tau)? / tv)
    }
}

/// Solves `-div(kappa grad u) + a u = mu` with natural boundary conditions.
pub fn solve(kappa: &DiffusionField, a: &GridFunction, mu: &MeasureData) -> Result<EllipticSolution> {
    let op = assemble(kappa, a)?;
    solve_with(&op, mu)
}

/// Solves with an already assembled operator.
pub fn solve_with(op: &DiscreteOperator, mu: &MeasureData) -> Result<EllipticSolution> {
    if op.is_singular() {
        return Err(Error::Singular(
            "reaction coefficient vanishes identically: the pure Neumann problem is not uniquely solvable".into(),
        ));
    }
    let load = mu.load(op.grid())?;
    let (u, residual_norm, solver_iterations) = op.solve_system(load.values())?;
    Ok(EllipticSolution { u: GridFunction::new(op.grid().clone(), u)?, residual_norm, solver_iterations })
}

/// Directional derivative `v = S'(a) h`, solving `A(a) v = -h u_a`.
pub fn linearized_solve(op: &DiscreteOperator, h: &GridFunction, u_a: &GridFunction) -> Result<GridFunction> {
    let rhs = h.zip_with(u_a, |x, y| -x * y)?;
    op.solve_function(&rhs)
}

/// Gradient in `a` of `(1/ell) ||S(a) - u_delta||_Y^ell`, given
/// `residual = S(a) - u_delta`, as a density for the midpoint pairing.
///
/// `g = -u_a w` with `A(a) w` equal to the fidelity derivative; the discrete
/// operator is symmetric, so no transpose solve is needed.
pub fn adjoint_gradient(
    op: &DiscreteOperator,
    u_a: &GridFunction,
    residual: &GridFunction,
    data_norm: &DataNorm,
    ell: f64,
) -> Result<GridFunction> {
    data_norm.validate()?;
    let r = data_norm.fidelity_derivative(residual, ell)?;
    if r.is_zero() {
        return Ok(GridFunction::zeros(u_a.grid()));
    }
    let w = op.solve_function(&r)?;
    u_a.zip_with(&w, |u, w| -u * w)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaConfig {
    pub background: f64,
    #[serde(default)]
    pub regions: Vec<Region>,
    /// Ellipticity bounds `[lambda0, Lambda]`.
    pub bounds: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct MeasureConfig {
    #[serde(default)]
    pub point_masses: Vec<PointMass>,
    /// Constant interior density.
    #[serde(default)]
    pub interior_density: Option<f64>,
    /// Constant density on every boundary face.
    #[serde(default)]
    pub boundary_density: Option<f64>,
}

/// Text description of a forward problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    #[serde(default = "two")]
    pub dimension: usize,
    pub points: usize,
    pub kappa: KappaConfig,
    #[serde(default)]
    pub measure: MeasureConfig,
    pub feasible: FeasibleSet,
}

fn two() -> usize {
    2
}

impl ProblemConfig {
    pub fn from_text(s: &str) -> Result<Self> {
        toml::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }
}

/// A forward problem: diffusion, data measure and admissible coefficients.
#[derive(Debug, Clone)]
pub struct EllipticProblem {
    pub kappa: DiffusionField,
    pub mu: MeasureData,
    pub feasible: FeasibleSet,
}

impl EllipticProblem {
    pub fn new(kappa: DiffusionField, mu: MeasureData, feasible: FeasibleSet) -> Result<Self> {
        feasible.validate(kappa.grid().dim())?;
        Ok(Self { kappa, mu, feasible })
    }

    pub fn from_config(cfg: &ProblemConfig) -> Result<Self> {
        let lengths = vec![1.0; cfg.dimension];
        let grid = Grid::new(cfg.dimension, cfg.points, &lengths)?;
        let kappa = DiffusionField::piecewise(&grid, cfg.kappa.background, &cfg.kappa.regions)?;
        kappa.check_bounds(cfg.kappa.bounds[0], cfg.kappa.bounds[1])?;
        let m = &cfg.measure;
        let mu = MeasureData {
            interior_masses: m.point_masses.clone(),
            interior_density: m.interior_density.map(|c| GridFunction::constant(&grid, c)),
            boundary_density: m.boundary_density.map(|g| MeasureData::uniform_boundary(&grid, g)).unwrap_or_default(),
        };
        Self::new(kappa, mu, cfg.feasible)
    }

    pub fn grid(&self) -> &Grid {
        self.kappa.grid()
    }

    /// `S(a)` for `a` in the feasible set, with its operator for sensitivities.
    pub fn forward(&self, a: &GridFunction) -> Result<(DiscreteOperator, EllipticSolution)> {
        if !self.feasible.contains(a)? {
            return Err(Error::Domain("coefficient lies outside the feasible set".into()));
        }
        let op = assemble(&self.kappa, a)?;
        let sol = solve_with(&op, &self.mu)?;
        Ok((op, sol))
    }

    pub fn solve(&self, a: &GridFunction) -> Result<EllipticSolution> {
        Ok(self.forward(a)?.1)
    }
}
