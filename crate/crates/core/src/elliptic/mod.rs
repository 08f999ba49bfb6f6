//! Cell-centred finite-volume solver for the Neumann problem
//! `-div(kappa grad u) + a u = mu` with measure data, the discrete Sobolev
//! and dual norms used to measure it, the admissible coefficient set and the
//! sensitivities needed for gradient-based coefficient identification.

mod field;
mod norms;
mod operator;
mod problem;

pub use field::{boundary_face_count, project_feasible, DiffusionField, FeasibleSet, MeasureData, PointMass, Region};
pub use norms::{dual_h1q_norm, sobolev_norm, spectral_dual_h1_norm, DataNorm, DualH1Norm};
pub use operator::{assemble, DiscreteOperator};
pub use problem::{
    adjoint_gradient, linearized_solve, solve, solve_with, EllipticProblem, EllipticSolution, KappaConfig,
    MeasureConfig, ProblemConfig,
};
