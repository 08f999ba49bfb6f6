//! Tikhonov regularization: the closed-form diagonal solver, projected
//! gradient descent for the elliptic coefficient problem, noise generation
//! and convergence-rate experiments with log-log fitting.

mod benchmark;
mod diagonal;
mod elliptic_model;
mod nonlinear;
mod rates;

pub use benchmark::EllipticBenchmark;
pub use diagonal::{diagonal_solve, DiagonalModel};
pub use elliptic_model::EllipticModel;
pub use nonlinear::{
    penalty, penalty_gradient, solve_nonlinear, NonlinearResult, Parametrization, StepRule, TikhonovConfig,
};
pub use rates::{
    add_noise, add_noise_coefficients, fit_rate, rate_experiment, validate_delta_grid, RateFit, RatePoint, RateReport,
};
