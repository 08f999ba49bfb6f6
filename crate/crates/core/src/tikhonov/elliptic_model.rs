use super::nonlinear::{solve_nonlinear, Parametrization, TikhonovConfig};
use super::rates::{add_noise, RatePoint};
use crate::elliptic::{DataNorm, EllipticProblem};
use crate::lebesgue::{lp_norm, Exponents, GridFunction};
use crate::vsc::{alpha_choice, IndexFunction};
use crate::Result;

/// The elliptic coefficient problem set up for a rate experiment: exact
/// coefficient, prior, data norm and the a-priori parameter choice.
#[derive(Debug, Clone)]
pub struct EllipticModel {
    pub problem: EllipticProblem,
    pub truth: GridFunction,
    pub data_norm: DataNorm,
    pub psi: IndexFunction,
    /// Solver settings; `alpha` is replaced per noise level.
    pub template: TikhonovConfig,
    pub exact_data: GridFunction,
}

impl EllipticModel {
    pub fn new(
        problem: EllipticProblem,
        truth: GridFunction,
        data_norm: DataNorm,
        psi: IndexFunction,
        template: TikhonovConfig,
    ) -> Result<Self> {
        data_norm.validate()?;
        let exact_data = problem.solve(&truth)?.u;
        Ok(Self { problem, truth, data_norm, psi, template, exact_data })
    }

    pub fn exponents(&self) -> Result<Exponents> {
        Exponents::new(self.template.p)
    }

    /// Error `||a - a_true||_p^{p_hat}` of the regularized solution at noise
    /// level `delta` with `alpha = delta^ell / Psi(delta)`.
    pub fn run(&self, delta: f64, seed: u64) -> Result<RatePoint> {
        let u_delta = add_noise(&self.exact_data, delta, &self.data_norm, seed)?;
        let mut cfg = self.template.clone();
        cfg.alpha = alpha_choice(delta, cfg.ell, &self.psi)?;
        let res = solve_nonlinear(&self.problem, &u_delta, &cfg, &self.data_norm, &Parametrization::Pointwise)?;
        let e = self.exponents()?;
        let error = lp_norm(&(&res.a - &self.truth), e.p)?.powf(e.p_hat);
        Ok(RatePoint { delta, alpha: cfg.alpha, error, iterations: res.iterations, stalled: res.stalled })
    }
}
