use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rates::gaussian;
use crate::elliptic::{adjoint_gradient, assemble, project_feasible, solve_with, DataNorm, EllipticProblem};
use crate::lebesgue::{lp_norm, Exponents, GridFunction};
use crate::{Error, Result};

/// Smoothing of `|t|` in the power map for `p < 2`.
const SMOOTHING: f64 = 1e-12;

/// Armijo backtracking parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepRule {
    /// Length of the first trial move, in coefficient units (max norm).
    pub initial: f64,
    pub shrink: f64,
    /// Sufficient-decrease constant.
    pub armijo: f64,
    pub max_backtracks: usize,
}

impl Default for StepRule {
    fn default() -> Self {
        Self { initial: 0.1, shrink: 0.5, armijo: 1e-4, max_backtracks: 40 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TikhonovConfig {
    pub ell: f64,
    pub p: f64,
    pub alpha: f64,
    /// Prior guess `a*`.
    pub a_star: GridFunction,
    pub max_iterations: usize,
    pub step: StepRule,
    /// Stop once the relative objective decrease stays below this for
    /// several consecutive iterations.
    pub tolerance: f64,
    pub starts: usize,
    /// Seed for the perturbed starting points.
    pub seed: u64,
}

impl TikhonovConfig {
    pub fn new(ell: f64, p: f64, alpha: f64, a_star: GridFunction) -> Self {
        Self {
            ell,
            p,
            alpha,
            a_star,
            max_iterations: 500,
            step: StepRule::default(),
            tolerance: 1e-9,
            starts: 3,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<Exponents> {
        if !(self.ell > 1.0) {
            return Err(Error::Config(format!("fidelity power ell must exceed 1, got {}", self.ell)));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::Config(format!("alpha must be positive, got {}", self.alpha)));
        }
        if self.starts == 0 || self.max_iterations == 0 {
            return Err(Error::Config("need at least one start and one iteration".into()));
        }
        let s = &self.step;
        if !(s.initial > 0.0 && s.shrink > 0.0 && s.shrink < 1.0 && s.armijo > 0.0 && s.armijo < 1.0) {
            return Err(Error::Config(format!("invalid backtracking parameters {s:?}")));
        }
        Exponents::new(self.p)
    }
}

/// How the unknown coefficient is represented.
#[derive(Debug, Clone, PartialEq)]
pub enum Parametrization {
    /// One unknown per cell.
    Pointwise,
    /// One unknown per label; `labels[i]` is the piece of cell `i`.
    Piecewise { labels: Vec<usize>, count: usize },
}

impl Parametrization {
    pub fn piecewise(labels: Vec<usize>) -> Self {
        let count = labels.iter().max().map_or(0, |m| m + 1);
        Parametrization::Piecewise { labels, count }
    }

    fn expand(&self, like: &GridFunction, c: &[f64]) -> GridFunction {
        match self {
            Parametrization::Pointwise => GridFunction::new(like.grid().clone(), c.to_vec()),
            Parametrization::Piecewise { labels, .. } => {
                GridFunction::new(like.grid().clone(), labels.iter().map(|&l| c[l]).collect())
            }
        }
        .expect("parameter length checked")
    }

    /// Parameters of a function that is constant on every piece.
    fn compress(&self, a: &GridFunction) -> Vec<f64> {
        match self {
            Parametrization::Pointwise => a.values().to_vec(),
            Parametrization::Piecewise { labels, count } => {
                let mut c = vec![0.0; *count];
                for (&l, &v) in labels.iter().zip(a.values()) {
                    c[l] = v;
                }
                c
            }
        }
    }

    /// Chain rule: density gradient to parameter gradient.
    fn pull_back(&self, g: &GridFunction) -> Vec<f64> {
        let m = g.grid().cell_measure();
        match self {
            Parametrization::Pointwise => g.values().iter().map(|v| v * m).collect(),
            Parametrization::Piecewise { labels, count } => {
                let mut c = vec![0.0; *count];
                for (&l, &v) in labels.iter().zip(g.values()) {
                    c[l] += v * m;
                }
                c
            }
        }
    }

    /// Projection onto the feasible set in parameter space. Clipping and
    /// shrinking toward a constant keep piecewise-constant functions so.
    fn project(&self, problem: &EllipticProblem, like: &GridFunction, c: &[f64]) -> Result<Vec<f64>> {
        Ok(self.compress(&project_feasible(&self.expand(like, c), &problem.feasible)?))
    }

    fn check(&self, len: usize) -> Result<()> {
        if let Parametrization::Piecewise { labels, count } = self {
            if labels.len() != len || *count == 0 {
                return Err(Error::Shape(format!("piecewise labels cover {} of {len} cells", labels.len())));
            }
        }
        Ok(())
    }
}

/// `(alpha/p_hat) ||w||_p^{p_hat}`.
pub fn penalty(w: &GridFunction, alpha: f64, e: &Exponents) -> Result<f64> {
    Ok(alpha / e.p_hat * lp_norm(w, e.p)?.powf(e.p_hat))
}

/// Gradient density of [`penalty`]: `alpha J(w)`, with `|t|` replaced by
/// `sqrt(t^2 + eps^2)` inside the power map when `p < 2`.
pub fn penalty_gradient(w: &GridFunction, alpha: f64, e: &Exponents) -> Result<GridFunction> {
    let n = lp_norm(w, e.p)?;
    if n == 0.0 {
        return Ok(GridFunction::zeros(w.grid()));
    }
    let scale = alpha * n.powf(e.p_hat - 1.0);
    let p = e.p;
    Ok(w.map(|v| {
        let t = v / n;
        let m = if p < 2.0 { (t * t + SMOOTHING * SMOOTHING).sqrt() } else { t.abs() };
        if m == 0.0 {
            0.0
        } else {
            scale * m.powf(p - 2.0) * t
        }
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearResult {
    pub a: GridFunction,
    pub objective: f64,
    pub initial_objective: f64,
    pub iterations: usize,
    /// Backtracking failed to find descent before convergence.
    pub stalled: bool,
    /// Objective after every accepted step of the returned run.
    pub history: Vec<f64>,
    pub start: usize,
}

struct Objective<'a> {
    problem: &'a EllipticProblem,
    u_delta: &'a GridFunction,
    cfg: &'a TikhonovConfig,
    data_norm: &'a DataNorm,
    exponents: Exponents,
    param: &'a Parametrization,
}

impl Objective<'_> {
    fn value(&self, c: &[f64]) -> Result<f64> {
        let a = self.param.expand(&self.cfg.a_star, c);
        let op = assemble(&self.problem.kappa, &a)?;
        let u = solve_with(&op, &self.problem.mu)?.u;
        let fid = self.data_norm.fidelity(&(&u - self.u_delta), self.cfg.ell)?;
        Ok(fid + penalty(&(&a - &self.cfg.a_star), self.cfg.alpha, &self.exponents)?)
    }

    fn gradient(&self, c: &[f64]) -> Result<Vec<f64>> {
        let a = self.param.expand(&self.cfg.a_star, c);
        let op = assemble(&self.problem.kappa, &a)?;
        let u = solve_with(&op, &self.problem.mu)?.u;
        let g = adjoint_gradient(&op, &u, &(&u - self.u_delta), self.data_norm, self.cfg.ell)?;
        let pen = penalty_gradient(&(&a - &self.cfg.a_star), self.cfg.alpha, &self.exponents)?;
        Ok(self.param.pull_back(&(&g + &pen)))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Consecutive small decreases needed to declare convergence.
const PATIENCE: usize = 5;

/// Final parameters, objective, iteration count, stall flag and objective history.
type Descent = (Vec<f64>, f64, usize, bool, Vec<f64>);

fn descend(obj: &Objective, start: Vec<f64>) -> Result<Descent> {
    let cfg = obj.cfg;
    let like = &cfg.a_star;
    let mut c = obj.param.project(obj.problem, like, &start)?;
    let mut f = obj.value(&c)?;
    let mut g = obj.gradient(&c)?;
    let mut history = vec![f];
    let gmax = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut step = if gmax > 0.0 { cfg.step.initial / gmax } else { 1.0 };
    let mut quiet = 0;
    let mut stalled = false;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let mut t = step;
        let mut accepted = None;
        for _ in 0..=cfg.step.max_backtracks {
            let trial: Vec<f64> = c.iter().zip(&g).map(|(x, d)| x - t * d).collect();
            let trial = obj.param.project(obj.problem, like, &trial)?;
            let d: Vec<f64> = trial.iter().zip(&c).map(|(a, b)| a - b).collect();
            let slope = dot(&g, &d);
            if d.iter().all(|v| *v == 0.0) || slope >= 0.0 {
                break;
            }
            let f_new = obj.value(&trial)?;
            if f_new <= f + cfg.step.armijo * slope {
                accepted = Some((trial, f_new, d, t));
                break;
            }
            if -slope <= 1e-15 * f.abs() {
                break;
            }
            t *= cfg.step.shrink;
        }
        let Some((trial, f_new, s, t)) = accepted else {
            // No admissible descent: either stationary to rounding, or stalled.
            let pg: Vec<f64> = obj.param.project(
                obj.problem,
                like,
                &c.iter().zip(&g).map(|(x, d)| x - step * d).collect::<Vec<_>>(),
            )?;
            let predicted = -dot(&g, &pg.iter().zip(&c).map(|(a, b)| a - b).collect::<Vec<_>>());
            stalled = predicted > cfg.tolerance * f.abs().max(f64::MIN_POSITIVE);
            break;
        };
        let g_new = obj.gradient(&trial)?;
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        step = if sy > 0.0 { dot(&s, &s) / sy } else { 4.0 * t };
        let decrease = (f - f_new) / f.abs().max(f64::MIN_POSITIVE);
        c = trial;
        f = f_new;
        g = g_new;
        history.push(f);
        quiet = if decrease < cfg.tolerance { quiet + 1 } else { 0 };
        if quiet >= PATIENCE {
            break;
        }
    }
    Ok((c, f, iterations, stalled, history))
}

/// Minimises `(1/ell)||S(a) - u_delta||_Y^ell + (alpha/p_hat)||a - a*||_p^{p_hat}`
/// over the feasible set by projected gradient descent with Barzilai-Borwein
/// steps and Armijo backtracking along the projection arc.
///
/// Start 0 is the projected prior; further starts perturb it with seeded
/// bounded noise. The run with the lowest objective is returned.
pub fn solve_nonlinear(
    problem: &EllipticProblem,
    u_delta: &GridFunction,
    cfg: &TikhonovConfig,
    data_norm: &DataNorm,
    param: &Parametrization,
) -> Result<NonlinearResult> {
    let exponents = cfg.validate()?;
    data_norm.validate()?;
    problem.grid().ensure_same(u_delta.grid())?;
    problem.grid().ensure_same(cfg.a_star.grid())?;
    param.check(problem.grid().len())?;
    let obj = Objective { problem, u_delta, cfg, data_norm, exponents, param };
    let prior = param.compress(&cfg.a_star);
    let scale = prior.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(problem.feasible.a_lower);
    let runs: Vec<_> = (0..cfg.starts)
        .into_par_iter()
        .map(|k| {
            let start: Vec<f64> = if k == 0 {
                prior.clone()
            } else {
                let z = gaussian(prior.len(), cfg.seed.wrapping_add(k as u64));
                prior.iter().zip(z).map(|(p, e)| p + 0.25 * scale * e.tanh()).collect()
            };
            descend(&obj, start).map(|r| (k, r))
        })
        .collect::<Result<_>>()?;
    let (start, (c, objective, iterations, stalled, history)) =
        runs.into_iter().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).expect("at least one start");
    Ok(NonlinearResult {
        a: param.expand(&cfg.a_star, &c),
        objective,
        initial_objective: history[0],
        iterations,
        stalled,
        history,
        start,
    })
}
