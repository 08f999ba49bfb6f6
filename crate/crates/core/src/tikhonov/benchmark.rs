use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::elliptic_model::EllipticModel;
use super::nonlinear::TikhonovConfig;
use crate::elliptic::{
    project_feasible, DataNorm, DiffusionField, EllipticProblem, FeasibleSet, MeasureData, PointMass, Region,
};
use crate::lebesgue::{estimate_cp, inverse_duality_map, lp_norm, Exponents, Grid, GridFunction};
use crate::paley::{LPDecomposition, SquareFunctionParams};
use crate::vsc::{calibrate_vsc_constant, HolderIndex, IndexFunction, Sample, SourceNorms, VscSetting};
use crate::Result;

/// Number of cosine modes per axis in sampled perturbation directions.
const SAMPLE_MODES: usize = 4;

/// Reference coefficient-identification problem on the unit square shared by
/// the stability, source-condition and rate experiments.
///
/// The truth is `a_dag = a_star + J^{-1}(f)` for a band-limited dual source
/// element `f`, so the source element is smooth of every order by
/// construction.
#[derive(Debug, Clone)]
pub struct EllipticBenchmark {
    pub problem: EllipticProblem,
    pub prior: GridFunction,
    pub truth: GridFunction,
    pub source: GridFunction,
    pub exponents: Exponents,
    /// Smoothness index of the source norm.
    pub theta: f64,
    /// Integrability of the source norm.
    pub q: f64,
    /// Exponent of the Hölder conditional stability estimate in `Y = L^2`.
    pub stability_exponent: f64,
}

impl EllipticBenchmark {
    /// Two-material diffusion field, a point source of weight 0.1 plus
    /// interior load 0.5 and boundary load 0.25, `p = 1.5`, `p_frak = 3`,
    /// `M = 10`, `a_lower = 1/2`, prior `a_star = 1.5` and source
    /// `0.34 cos(pi x) cos(pi y)`.
    ///
    /// The loads are kept small on purpose: with white noise on `n^2` cells
    /// the noise contribution to the minimiser's error grows with the data
    /// magnitude, and at larger loads it swamps the bias decay below
    /// `delta = 1e-3`.
    pub fn reference(n: usize) -> Result<Self> {
        Self::reference_with(n, 1.5, FeasibleSet::new(3.0, 10.0, 0.5, 2)?)
    }

    /// [`reference`](Self::reference) with a different penalty exponent and
    /// admissible set.
    pub fn reference_with(n: usize, p: f64, feasible: FeasibleSet) -> Result<Self> {
        let g = Grid::unit_square(n)?;
        let kappa = DiffusionField::piecewise(&g, 1.0, &[Region { x: [0.5, 1.0], y: [0.0, 1.0], value: 2.0 }])?;
        let mu = MeasureData {
            interior_masses: vec![PointMass { location: [0.3, 0.7], weight: 0.1 }],
            interior_density: Some(GridFunction::constant(&g, 0.5)),
            boundary_density: MeasureData::uniform_boundary(&g, 0.25),
        };
        let problem = EllipticProblem::new(kappa, mu, feasible)?;
        let prior = GridFunction::constant(&g, 1.5);
        let source = GridFunction::from_fn(&g, |x| 0.34 * (PI * x[0]).cos() * (PI * x[1]).cos());
        Self::new(problem, prior, source, p)
    }

    pub fn new(problem: EllipticProblem, prior: GridFunction, source: GridFunction, p: f64) -> Result<Self> {
        let exponents = Exponents::new(p)?;
        let truth = &prior + &inverse_duality_map(&source, &exponents)?;
        problem.forward(&truth)?;
        let q = exponents.q;
        Ok(Self { problem, prior, truth, source, exponents, theta: 0.5, q, stability_exponent: 0.5 })
    }

    pub fn grid(&self) -> &Grid {
        self.truth.grid()
    }

    /// `||f||_{F^theta_q}` on the Neumann cosine decomposition.
    pub fn source_norm(&self) -> Result<f64> {
        let d = LPDecomposition::neumann_dyadic(self.grid())?;
        d.tl_norm(&self.source, &SquareFunctionParams::new(self.theta, self.q)?)
    }

    /// `Psi(delta) = C ||f|| delta^mu`: prior smoothness `s = 1`,
    /// `q_hat = min(q, 2)` and the Hölder conditional stability estimate
    /// with exponent `mu = stability_exponent`.
    pub fn index_function(&self, constant: f64) -> Result<IndexFunction> {
        let norm = self.source_norm()?;
        IndexFunction::new(
            constant,
            1.0,
            self.theta,
            self.exponents.q_hat,
            SourceNorms { smooth: norm, theta: norm },
            HolderIndex::new(self.stability_exponent)?,
        )
    }

    /// `count` feasible coefficients `P(a_dag + t w)` with smooth random
    /// directions `w` of unit `L^p` norm and `t` log-uniform in
    /// `[5e-4, 0.5]`, each paired with its `L^2` data distance to the truth.
    pub fn samples(&self, count: usize, seed: u64) -> Result<Vec<Sample>> {
        let g = self.grid();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<(Vec<f64>, f64)> = (0..count)
            .map(|_| {
                let c = (0..SAMPLE_MODES * SAMPLE_MODES).map(|_| rng.random_range(-1.0..1.0)).collect();
                (c, 0.5 * 10f64.powf(-3.0 * rng.random::<f64>()))
            })
            .collect();
        let exact = self.problem.solve(&self.truth)?.u;
        draws
            .par_iter()
            .map(|(c, t)| {
                let w = GridFunction::from_fn(g, |x| {
                    let mut v = 0.0;
                    for j in 0..SAMPLE_MODES {
                        for k in 0..SAMPLE_MODES {
                            let damp = 1.0 + (j * j + k * k) as f64;
                            v += c[SAMPLE_MODES * j + k] * (j as f64 * PI * x[0]).cos() * (k as f64 * PI * x[1]).cos()
                                / damp;
                        }
                    }
                    v
                });
                let w = w.scaled(t / lp_norm(&w, self.exponents.p)?);
                let x = project_feasible(&(&self.truth + &w), &self.problem.feasible)?;
                let u = self.problem.solve(&x)?.u;
                Ok(Sample { distance: DataNorm::L2.norm(&(&u - &exact))?, x })
            })
            .collect()
    }

    /// Convexity constant estimate and the source-condition setting with
    /// `beta = c_p / 2`.
    pub fn vsc_setting(&self, seed: u64) -> Result<VscSetting<'_>> {
        let c_p = estimate_cp(&self.exponents, 2000, seed)?;
        Ok(VscSetting { x_dag: &self.truth, x_star: &self.prior, beta: c_p / 2.0, c_p, exponents: self.exponents })
    }

    /// Smallest power-of-two constant `C >= 2^-20` making every margin of
    /// `samples` nonnegative.
    pub fn calibrate(&self, samples: &[Sample], setting: &VscSetting) -> Result<f64> {
        calibrate_vsc_constant(samples, setting, &self.index_function(1.0)?, 2f64.powi(-20))
    }

    /// Rate experiment in `Y = L^2` with `ell = 2` and `Psi` scaled by
    /// `constant`. The solver runs to a relative objective decrease of
    /// `1e-12` so that errors reflect the minimiser rather than early
    /// stopping.
    pub fn rate_model(&self, constant: f64) -> Result<EllipticModel> {
        let mut cfg = TikhonovConfig::new(2.0, self.exponents.p, 1.0, self.prior.clone());
        cfg.tolerance = 1e-12;
        cfg.max_iterations = 20_000;
        EllipticModel::new(self.problem.clone(), self.truth.clone(), DataNorm::L2, self.index_function(constant)?, cfg)
    }
}
