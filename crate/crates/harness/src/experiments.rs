//! One runner per model. Each returns an [`Outcome`]: named checks against
//! explicit limits, the rate report for sweep models and any calibrated
//! constants.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::sync::Mutex;
use std::time::Instant;

use lpvsc::elliptic::{dual_h1q_norm, sobolev_norm, solve, DiffusionField, FeasibleSet, MeasureData};
use lpvsc::lebesgue::{convexity_gap, duality_map, duality_product, estimate_cp, lp_norm, phi_p_holder_estimate};
use lpvsc::paley::calibration::{calibrate, equivalence_ratio, random_test_function, CalibrationConfig};
use lpvsc::paley::rbound::{rbound_estimate, Multiplier, RBoundConfig};
use lpvsc::paley::LPDecomposition;
use lpvsc::tikhonov::{rate_experiment, DiagonalModel, EllipticBenchmark, RatePoint, RateReport};
use lpvsc::vsc::{check_vsc, HolderIndex, IndexFunction, Sample, SourceNorms};
use lpvsc::{Complex64, Exponents, Grid, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};
use crate::spec::{ExperimentSpec, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    AtMost,
    AtLeast,
    Holds,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub limit: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, relation: Relation::AtMost, passed: value <= limit }
    }

    pub fn at_least(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, limit, relation: Relation::AtLeast, passed: value >= limit }
    }

    /// A yes/no property; `value` is 1 when it holds.
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        let v = if ok { 1.0 } else { 0.0 };
        Self { name: name.into(), value: v, limit: 1.0, relation: Relation::Holds, passed: ok }
    }

    /// Distance to the limit in the passing direction; negative on failure.
    pub fn slack(&self) -> f64 {
        match self.relation {
            Relation::AtMost => self.limit - self.value,
            Relation::AtLeast => self.value - self.limit,
            Relation::Holds => self.value - self.limit,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub model: Model,
    pub checks: Vec<Check>,
    pub report: Option<RateReport>,
    pub constants: BTreeMap<String, f64>,
    /// Extra text artifacts written next to the summary, by file name.
    pub artifacts: BTreeMap<String, String>,
    pub elapsed_seconds: f64,
}

impl Outcome {
    fn new(spec: &ExperimentSpec) -> Self {
        Self {
            name: spec.name.clone(),
            model: spec.model,
            checks: Vec::new(),
            report: None,
            constants: BTreeMap::new(),
            artifacts: BTreeMap::new(),
            elapsed_seconds: 0.0,
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn stalled(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.points.iter().any(|p| p.stalled))
    }

    /// The first check is the headline one; its slack is the reported margin.
    pub fn margin(&self) -> Option<f64> {
        self.checks.first().map(Check::slack)
    }
}

pub fn run(spec: &ExperimentSpec) -> Result<Outcome> {
    let start = Instant::now();
    let mut out = Outcome::new(spec);
    match spec.model {
        Model::Diagonal => diagonal(spec, &mut out)?,
        Model::Elliptic => elliptic(spec, &mut out)?,
        Model::VscCheck => vsc_check(spec, &mut out)?,
        Model::LpCalibration => lp_calibration(spec, &mut out)?,
        Model::Stability => stability(spec, &mut out)?,
        Model::Rbound => rbound(spec, &mut out)?,
        Model::Duality => duality(spec, &mut out)?,
        Model::Convexity => convexity(spec, &mut out)?,
        Model::Holder => holder(spec, &mut out)?,
        Model::IndexFunction => index_function(spec, &mut out)?,
        Model::ForwardSolver => forward_solver(spec, &mut out)?,
    }
    out.elapsed_seconds = start.elapsed().as_secs_f64();
    Ok(out)
}

fn need<T: Copy>(spec: &ExperimentSpec, v: Option<T>, key: &str) -> Result<T> {
    v.ok_or_else(|| HarnessError::Spec(format!("model {} needs key `{key}`", spec.model.name())))
}

fn exponents_or(spec: &ExperimentSpec, default: &[f64]) -> Vec<f64> {
    if spec.exponents.is_empty() {
        default.to_vec()
    } else {
        spec.exponents.clone()
    }
}

fn max_abs_diff(a: &GridFunction, b: &GridFunction) -> f64 {
    a.values().iter().zip(b.values()).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Squared-error sweep; the norm slope is half the fitted slope.
fn diagonal(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let s = need(spec, spec.s, "s")?;
    let model = DiagonalModel::new(need(spec, spec.points, "points")?, s, spec.psi.constant.unwrap_or(1.0))?;
    let seed = spec.seed(0);
    let report = rate_experiment(&spec.delta_grid, model.theoretical_exponent(), |d| model.run(d, seed))?;
    let target = s / (1.0 + s);
    out.checks.push(Check::at_most("norm slope distance to s/(1+s)", (report.fitted_slope / 2.0 - target).abs(), 0.1));
    out.checks.push(Check::holds("errors strictly decreasing", report.errors_strictly_decreasing()));
    out.constants.insert("C".into(), model.constant);
    out.report = Some(report);
    Ok(())
}

fn benchmark(spec: &ExperimentSpec) -> Result<EllipticBenchmark> {
    let feasible = FeasibleSet::new(
        need(spec, spec.p_frak, "p_frak")?,
        need(spec, spec.norm_bound, "M")?,
        need(spec, spec.a_lower, "a_lower")?,
        2,
    )?;
    let mut b =
        EllipticBenchmark::reference_with(need(spec, spec.points, "points")?, need(spec, spec.p, "p")?, feasible)?;
    if let Some(theta) = spec.theta {
        b.theta = theta;
    }
    if let Some(mu) = spec.psi.holder {
        b.stability_exponent = mu;
    }
    Ok(b)
}

/// `C` from `[psi] constant`, or calibrated on `calibration_samples` samples.
fn vsc_constant(spec: &ExperimentSpec, b: &EllipticBenchmark, out: &mut Outcome) -> Result<f64> {
    if let Some(c) = spec.psi.constant {
        return Ok(c);
    }
    let setting = b.vsc_setting(spec.seed(0))?;
    let samples = b.samples(spec.calibration_samples.unwrap_or(2000), spec.seed(0))?;
    let c = b.calibrate(&samples, &setting)?;
    out.constants.insert("c_p".into(), setting.c_p);
    out.constants.insert("beta".into(), setting.beta);
    Ok(c)
}

/// Calibrated `C` with the convexity constant and `beta` it was computed for.
pub fn calibrate_vsc(spec: &ExperimentSpec) -> Result<BTreeMap<String, f64>> {
    let b = benchmark(spec)?;
    let mut out = Outcome::new(spec);
    let c = vsc_constant(spec, &b, &mut out)?;
    out.constants.insert("C".into(), c);
    Ok(out.constants)
}

fn elliptic(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let b = benchmark(spec)?;
    let c = vsc_constant(spec, &b, out)?;
    out.constants.insert("C".into(), c);
    let mut model = b.rate_model(c)?;
    let t = &mut model.template;
    let sp = &spec.solver;
    t.max_iterations = sp.max_iterations.unwrap_or(t.max_iterations);
    t.starts = sp.starts.unwrap_or(t.starts);
    t.tolerance = sp.tolerance.unwrap_or(t.tolerance);
    t.step.initial = sp.initial_step.unwrap_or(t.step.initial);
    t.step.max_backtracks = sp.max_backtracks.unwrap_or(t.step.max_backtracks);
    let seed = spec.seed(1);
    let theo = b.stability_exponent;
    let seen = Mutex::new(Vec::new());
    let report = rate_experiment(&spec.delta_grid, theo, |d| {
        let point = model.run(d, seed)?;
        seen.lock().expect("no panics while holding the lock").push(point);
        Ok(point)
    });
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            let seen = seen.into_inner().expect("lock is free");
            if seen.len() < spec.delta_grid.len() {
                return Err(e.into());
            }
            partial_report(seen, theo).ok_or(e)?
        }
    };
    out.checks.push(Check::at_least("fitted slope", report.fitted_slope, 0.8 * theo));
    out.checks.push(Check::holds("errors strictly decreasing", report.errors_strictly_decreasing()));
    out.report = Some(report);
    Ok(())
}

/// Report for a sweep in which stalls left too few points to fit: all points
/// are kept, the slope is NaN. `None` when nothing stalled, so the original
/// error stands.
fn partial_report(mut points: Vec<RatePoint>, theoretical_exponent: f64) -> Option<RateReport> {
    if !points.iter().any(|p| p.stalled) {
        return None;
    }
    points.sort_by(|a, b| b.delta.total_cmp(&a.delta));
    let excluded = points.iter().filter(|p| p.stalled).map(|p| p.delta).collect();
    Some(RateReport {
        points,
        fitted_slope: f64::NAN,
        theoretical_exponent,
        intercept: f64::NAN,
        r_squared: f64::NAN,
        excluded,
    })
}

fn vsc_check(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let b = benchmark(spec)?;
    let c = vsc_constant(spec, &b, out)?;
    let setting = b.vsc_setting(spec.seed(0))?;
    let fresh = b.samples(need(spec, spec.samples, "samples")?, spec.seed(1))?;
    let rep = check_vsc(&fresh, &setting, &b.index_function(c)?)?;
    out.checks.push(Check::at_least("worst margin on fresh samples", rep.worst_margin, 0.0));
    out.constants.insert("C".into(), c);
    out.constants.insert("c_p".into(), setting.c_p);
    out.constants.insert("beta".into(), setting.beta);
    out.artifacts.insert("vsc.toml".into(), rep.to_text());
    Ok(())
}

fn stability(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let b = benchmark(spec)?;
    let q = need(spec, spec.q, "q")?;
    let tau = need(spec, spec.tau, "tau")?;
    let n = need(spec, spec.samples, "samples")?;
    let samples = b.samples(2 * n, spec.seed(0))?;
    let exact = b.problem.solve(&b.truth)?.u;
    let max_ratio = |set: &[Sample]| -> Result<f64> {
        let mut m: f64 = 0.0;
        for s in set {
            let num = dual_h1q_norm(&(&s.x - &b.truth), q)?;
            let u = b.problem.solve(&s.x)?.u;
            m = m.max(num / sobolev_norm(&(&u - &exact), 1, tau)?);
        }
        Ok(m)
    };
    let small = max_ratio(&samples[..n])?;
    let large = max_ratio(&samples)?;
    out.checks.push(Check::at_most("relative change of the max ratio", (large / small - 1.0).abs(), 0.25));
    out.checks.push(Check::holds("max ratio finite and positive", small.is_finite() && small > 0.0));
    out.constants.insert("max_ratio".into(), small);
    out.constants.insert("max_ratio_doubled".into(), large);
    Ok(())
}

fn lp_calibration(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let grid = Grid::unit_interval(need(spec, spec.points, "points")?)?;
    let mut d = LPDecomposition::dyadic_fourier(&grid)?;
    let qs = exponents_or(spec, &[1.5, 2.0, 3.0]);
    let cfg = CalibrationConfig {
        exponents: qs.clone(),
        samples: spec.samples.unwrap_or(1000),
        seed: spec.seed(0),
        theta: spec.theta.unwrap_or(1.0),
        s: spec.s.unwrap_or(0.5),
        ..CalibrationConfig::default()
    };
    let rep = calibrate(&mut d, &cfg)?;
    out.checks.push(Check::at_most("c*", rep.c_star, 10.0));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed(1));
    let mut recon: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    let mut pj: f64 = 0.0;
    let mut bands: f64 = 0.0;
    for k in 0..50 {
        let z = random_test_function(&grid, &mut rng);
        let scale = z.max_modulus().max(1.0);
        recon = recon.max(lp_norm(&(&d.reconstruct(&z)? - &z), 2.0)? / lp_norm(&z, 2.0)?);
        let parts = d.projections(&z)?;
        for j in 0..d.len() {
            for (k, part) in parts.iter().enumerate() {
                if j.abs_diff(k) >= 2 {
                    ortho = ortho.max(d.project(j, part)?.max_modulus() / scale);
                }
            }
            let lo = j.saturating_sub(1);
            let hi = (j + 1).min(d.len() - 1);
            let mut around = parts[lo].clone();
            for part in &parts[lo + 1..=hi] {
                around = &around + part;
            }
            pj = pj.max(max_abs_diff(&d.project(j, &around)?, &parts[j]) / scale);
        }
        let lambda = 1.0 + 0.37 * k as f64 % d.j_max() as f64;
        let low = d.low_pass(lambda, &z)?;
        let high = d.high_pass(lambda, &z)?;
        bands = bands.max(max_abs_diff(&(&low + &high), &z) / scale);
        let l = lambda.floor() as usize;
        for (j, pz) in parts.iter().enumerate() {
            let (pl, ph) = (d.project(j, &low)?, d.project(j, &high)?);
            if j < l {
                bands = bands.max(ph.max_modulus() / scale).max(max_abs_diff(&pl, pz) / scale);
            }
            if j >= l + 2 {
                bands = bands.max(pl.max_modulus() / scale).max(max_abs_diff(&ph, pz) / scale);
            }
        }
    }
    out.checks.push(Check::at_most("relative reconstruction error", recon, 1e-12));
    out.checks.push(Check::at_most("products of distant shells", ortho, 1e-14));
    out.checks.push(Check::at_most("neighbouring-shell identity", pj, 1e-12));
    out.checks.push(Check::at_most("band-split case tables", bands, 1e-12));

    let c = rep.c_star;
    let fresh = spec.samples.unwrap_or(1000);
    for &q in &qs {
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for _ in 0..fresh {
            let r = equivalence_ratio(&d, &random_test_function(&grid, &mut rng), q)?;
            lo = lo.min(r);
            hi = hi.max(r);
        }
        out.checks.push(Check::at_least(format!("fresh ratio lower end, q = {q}"), lo, 1.0 / c));
        out.checks.push(Check::at_most(format!("fresh ratio upper end, q = {q}"), hi, c));
    }
    out.constants.insert("c_star".into(), rep.c_star);
    out.constants.insert("K".into(), rep.duality_constant);
    out.constants.insert("C_R".into(), rep.rbound_constant);
    out.artifacts.insert("calibration.toml".into(), rep.to_text());
    Ok(())
}

fn rbound(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let grid = Grid::unit_interval(need(spec, spec.points, "points")?)?;
    let trials = spec.samples.unwrap_or(40);
    let mut identity_ok = true;
    for &q in &exponents_or(spec, &[1.5, 2.0, 3.0]) {
        for t in 0..trials {
            let cfg = RBoundConfig::new(q, 1, 5, spec.seed(0).wrapping_add(t as u64));
            identity_ok &= rbound_estimate(&[Multiplier::Identity], &grid, &cfg)? == 1.0;
        }
    }
    out.checks.push(Check::holds("identity estimate is exactly 1 in every trial", identity_ok));

    let d = LPDecomposition::dyadic_fourier(&grid)?;
    let ops: Vec<Multiplier> = d
        .masks()
        .iter()
        .enumerate()
        .map(|(j, m)| {
            let c = Complex64::from_polar(1.0 + 0.25 * j as f64, 0.3 * j as f64);
            Multiplier::Symbol(m.iter().map(|&v| c * v).collect())
        })
        .collect();
    let sup = ops.iter().map(Multiplier::sup_magnitude).fold(0.0, f64::max);
    let est = rbound_estimate(&ops, &grid, &RBoundConfig::new(2.0, trials, 4, spec.seed(1)))?;
    out.checks.push(Check::at_most("relative gap to the largest symbol at q = 2", (1.0 - est / sup).abs(), 0.05));
    out.constants.insert("estimate_q2".into(), est);
    out.constants.insert("max_symbol".into(), sup);
    Ok(())
}

/// Random function with entries in `[-1, 1]` times a scale spread over six
/// decades.
fn random_scaled(grid: &Grid, rng: &mut ChaCha8Rng) -> GridFunction {
    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
    GridFunction::from_fn(grid, |_| scale * rng.random_range(-1.0..1.0))
}

fn duality(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let grid = Grid::unit_interval(need(spec, spec.points, "points")?)?;
    let count = need(spec, spec.samples, "samples")?;
    for &p in &exponents_or(spec, &[1.5, 2.0, 3.0, 4.0]) {
        let e = Exponents::new(p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed(0));
        let (mut pairing, mut norm): (f64, f64) = (0.0, 0.0);
        for _ in 0..count {
            let w = random_scaled(&grid, &mut rng);
            let j = duality_map(&w, &e)?;
            let wn = lp_norm(&w, p)?;
            let target = wn.powf(e.p_hat);
            pairing = pairing.max((duality_product(&w, &j)? - target).abs() / target);
            let target = wn.powf(e.p_hat - 1.0);
            norm = norm.max((lp_norm(&j, e.q)? - target).abs() / target);
        }
        out.checks.push(Check::at_most(format!("pairing identity, p = {p}"), pairing, 1e-10));
        out.checks.push(Check::at_most(format!("norm identity, p = {p}"), norm, 1e-10));
    }
    Ok(())
}

fn convexity(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let grid = Grid::unit_interval(need(spec, spec.points, "points")?)?;
    let count = need(spec, spec.samples, "samples")?;
    let cp2 = estimate_cp(&Exponents::new(2.0)?, spec.calibration_samples.unwrap_or(count), spec.seed(0))?;
    out.checks.push(Check::at_most("|c_p(2) - 1|", (cp2 - 1.0).abs(), 1e-10));
    for &p in &exponents_or(spec, &[1.5, 2.0, 3.0, 4.0]) {
        let e = Exponents::new(p)?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed(0));
        let mut worst = f64::INFINITY;
        for _ in 0..count {
            let w = GridFunction::from_fn(&grid, |_| rng.random_range(-1.0..1.0));
            let y = GridFunction::from_fn(&grid, |_| rng.random_range(-1.0..1.0));
            worst = worst.min(convexity_gap(&w, &y, &e, 0.0)?);
        }
        out.checks.push(Check::at_least(format!("smallest gap, p = {p}"), worst, -1e-12));
    }
    out.constants.insert("c_p(2)".into(), cp2);
    Ok(())
}

fn holder(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let count = spec.samples.unwrap_or(4000);
    for &p in &exponents_or(spec, &[1.5, 2.5, 3.5]) {
        let h = phi_p_holder_estimate(p, count)?;
        out.checks.push(Check::at_most(
            format!("Hölder estimate / leading factor, p = {p}"),
            h.constant_estimate / h.leading_factor,
            2.0,
        ));
        out.constants.insert(format!("holder_constant(p={p})"), h.constant_estimate);
    }
    Ok(())
}

fn index_function(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let pairs: Vec<[f64; 2]> = if spec.smoothness_pairs.is_empty() {
        vec![[0.5, 2.0], [1.0 / 3.0, 2.0], [0.5, 1.5]]
    } else {
        spec.smoothness_pairs.clone()
    };
    let base = HolderIndex::new(spec.psi.holder.unwrap_or(1.0))?;
    let norms = SourceNorms { smooth: 1.7, theta: 2.3 };
    for [s, q_hat] in pairs {
        let f = IndexFunction::new(spec.psi.constant.unwrap_or(1.0), s, spec.theta.unwrap_or(1.0), q_hat, norms, base)?;
        let label = format!("s = {s:.4}, q_hat = {q_hat}");

        let grid: Vec<f64> = (0..=40).map(|k| 10f64.powf(-10.0 + 0.25 * k as f64)).collect();
        let vals: Vec<f64> = grid.iter().map(|&d| f.eval(d)).collect();
        let mut shape = vals.windows(2).all(|w| w[1] > w[0]);
        for i in 0..grid.len() {
            for j in 0..grid.len() {
                for t in [0.25, 0.5, 0.75] {
                    shape &= f.eval(t * grid[i] + (1.0 - t) * grid[j]) >= t * vals[i] + (1.0 - t) * vals[j] - 1e-10;
                }
            }
        }
        out.checks.push(Check::holds(format!("monotone and concave, {label}"), shape));

        let mut inf_err: f64 = 0.0;
        for delta in [1e-1, 1e-2, 1e-4, 1e-6, 1e-8] {
            let b = f.base.eval(delta);
            let brute = (0..=63_000).map(|k| f.bracket(1.0 + k as f64 * 1e-3, b)).fold(f64::INFINITY, f64::min);
            inf_err = inf_err.max((f.eval(delta) / f.c - brute).abs() / brute);
        }
        out.checks.push(Check::at_most(format!("inf-form vs brute force, {label}"), inf_err, 1e-6));

        let mut r: Vec<f64> =
            (0..=32).map(|k| f.decay_ratio(10f64.powf(-10.0 + 0.25 * k as f64))).collect::<lpvsc::Result<_>>()?;
        let max = r.iter().copied().fold(0.0, f64::max);
        r.sort_by(f64::total_cmp);
        out.checks.push(Check::at_most(format!("decay ratio max / median, {label}"), max / r[r.len() / 2], 10.0));
    }
    Ok(())
}

fn green(x: f64, x0: f64) -> f64 {
    let (lo, hi) = (x.min(x0), x.max(x0));
    lo.cosh() * (1.0 - hi).cosh() / 1f64.sinh()
}

fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn forward_solver(spec: &ExperimentSpec, out: &mut Outcome) -> Result<()> {
    let _ = spec;
    let x0 = 1.0 / 3.0;
    let mut green_errors = Vec::new();
    for n in [32, 64, 128, 256, 512, 1024] {
        let g = Grid::unit_interval(n)?;
        let sol = solve(
            &DiffusionField::constant(&g, 1.0)?,
            &GridFunction::constant(&g, 1.0),
            &MeasureData::point([x0, 0.0], 1.0),
        )?;
        let exact = GridFunction::from_fn(&g, |x| green(x[0], x0));
        green_errors.push(lp_norm(&(&exact - &sol.u), 1.0)?);
    }
    let order = observed_orders(&green_errors).into_iter().fold(f64::INFINITY, f64::min);
    out.checks.push(Check::at_least("smallest Dirac L1 order", order, 0.9));

    let mut cosine_errors = Vec::new();
    for n in [16, 32, 64, 128] {
        let g = Grid::unit_square(n)?;
        let c = 1.0 + 2.0 * PI * PI;
        let mu = MeasureData {
            interior_density: Some(GridFunction::from_fn(&g, |x| c * (PI * x[0]).cos() * (PI * x[1]).cos())),
            ..Default::default()
        };
        let sol = solve(&DiffusionField::constant(&g, 1.0)?, &GridFunction::constant(&g, 1.0), &mu)?;
        let exact = GridFunction::from_fn(&g, |x| (PI * x[0]).cos() * (PI * x[1]).cos());
        cosine_errors.push(lp_norm(&(&exact - &sol.u), 2.0)?);
    }
    let worst = observed_orders(&cosine_errors).into_iter().map(|o| (o - 2.0).abs()).fold(0.0, f64::max);
    out.checks.push(Check::at_most("manufactured L2 order distance to 2", worst, 0.2));
    for (n, e) in [32, 64, 128, 256, 512, 1024].iter().zip(&green_errors) {
        out.constants.insert(format!("dirac_l1_error(n={n:04})"), *e);
    }
    for (n, e) in [16, 32, 64, 128].iter().zip(&cosine_errors) {
        out.constants.insert(format!("cosine_l2_error(n={n:03})"), *e);
    }
    Ok(())
}
