//! Tikhonov regularization with `L^p` penalties and the numerical machinery
//! needed to check variational source conditions for it.
//!
//! The crate is organised bottom-up:
//!
//! * [`lebesgue`]: grids, grid functions, `L^p` norms, the generalized
//!   duality map and uniform-convexity diagnostics.
//! * [`paley`]: Littlewood-Paley decompositions (dyadic Fourier, Neumann
//!   cosine and orthonormal-basis variants), Triebel-Lizorkin square-function
//!   norms and randomized R-bound estimation.
//! * [`vsc`]: index functions, the stability and source-condition checkers
//!   and the a-priori parameter choice.
//! * [`elliptic`]: a finite-volume solver for the Neumann problem
//!   `-div(kappa grad u) + a u = mu` with measure data, plus sensitivities.
//! * [`tikhonov`]: the diagonal and nonlinear Tikhonov solvers, noise
//!   generation and convergence-rate experiments.

// `!(x > 0.0)` deliberately rejects NaN together with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod elliptic;
pub mod error;
pub mod lebesgue;
pub mod paley;
pub mod tikhonov;
pub mod vsc;

pub use error::{Error, Result};
pub use lebesgue::{Exponents, Grid, GridFunction, Scalar};
pub use num_complex::Complex64;
