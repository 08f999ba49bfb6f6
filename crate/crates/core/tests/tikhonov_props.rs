use lpvsc::elliptic::{DataNorm, DiffusionField, EllipticProblem, FeasibleSet, MeasureData, PointMass};
use lpvsc::lebesgue::{lp_norm, Exponents};
use lpvsc::tikhonov::*;
use lpvsc::vsc::alpha_choice;
use lpvsc::{Grid, GridFunction};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn diagonal_first_order_condition() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let sigma: Vec<f64> = (0..200).map(|_| rng.random_range(1e-3..2.0)).collect();
    let y: Vec<f64> = (0..200).map(|_| rng.random_range(-3.0..3.0)).collect();
    for alpha in [1e-6, 1e-2, 1.0, 30.0] {
        let x = diagonal_solve(&sigma, &y, alpha).unwrap();
        for k in 0..sigma.len() {
            let r = sigma[k] * (sigma[k] * x[k] - y[k]) + alpha * x[k];
            assert!(r.abs() < 1e-13, "k={k} alpha={alpha}: {r}");
        }
    }
}

#[test]
fn diagonal_matches_grid_search() {
    let sigma = [1.0, 0.5, 0.2, 0.05, 0.01];
    let y = [0.9, -0.4, 0.3, 0.02, -0.05];
    let alpha = 0.01;
    let x = diagonal_solve(&sigma, &y, alpha).unwrap();
    for k in 0..5 {
        // The objective is separable: search each coordinate on a 1e-4 lattice.
        let obj = |t: f64| 0.5 * (sigma[k] * t - y[k]).powi(2) + 0.5 * alpha * t * t;
        let best = (-40_000..=40_000).map(|i| i as f64 * 1e-4).min_by(|a, b| obj(*a).total_cmp(&obj(*b))).unwrap();
        assert!((best - x[k]).abs() < 1e-3, "k={k}: {best} vs {}", x[k]);
    }
}

#[test]
fn vanishing_alpha_recovers_exact_solution() {
    let m = DiagonalModel::new(64, 1.0, 1.0).unwrap();
    let y = m.exact_data();
    let mut last = f64::INFINITY;
    for alpha in [1e-2, 1e-4, 1e-6, 1e-8, 1e-10] {
        let x = diagonal_solve(&m.singular_values, &y, alpha).unwrap();
        let err = x.iter().zip(&m.truth).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err < last);
        last = err;
    }
    assert!(last < 1e-6, "{last}");
}

#[test]
fn diagonal_rates_match_the_optimal_order() {
    let deltas: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    for s in [0.25, 0.5, 1.0] {
        let m = DiagonalModel::new(1 << 20, s, 1.0).unwrap();
        let rep = rate_experiment(&deltas, m.theoretical_exponent(), |d| m.run(d, 7)).unwrap();
        // Errors are squared; the norm converges at half the slope.
        let slope = rep.fitted_slope / 2.0;
        let expected = s / (1.0 + s);
        assert!((slope - expected).abs() < 0.1, "s={s}: slope {slope} vs {expected}");
        assert!(rep.errors_strictly_decreasing());
    }
}

#[test]
fn noise_has_the_requested_level() {
    let g = Grid::unit_square(16).unwrap();
    let u = GridFunction::from_fn(&g, |x| 1.0 + x[0] * x[1]);
    assert_eq!(add_noise(&u, 0.0, &DataNorm::L2, 3).unwrap(), u);
    for norm in [DataNorm::L2, DataNorm::Lebesgue { tau: 3.0 }, DataNorm::Sobolev { tau: 2.0 }] {
        let v = add_noise(&u, 0.05, &norm, 3).unwrap();
        let dist = norm.norm(&(&v - &u)).unwrap();
        assert!((dist - 0.05).abs() < 1e-12 * 0.05, "{norm:?}: {dist}");
    }
    let a = add_noise(&u, 0.05, &DataNorm::L2, 3).unwrap();
    let b = add_noise(&u, 0.05, &DataNorm::L2, 4).unwrap();
    assert_ne!(a, b);
    assert_eq!(a, add_noise(&u, 0.05, &DataNorm::L2, 3).unwrap());
    assert!(add_noise(&u, -1.0, &DataNorm::L2, 3).is_err());

    let y = vec![1.0; 50];
    let z = add_noise_coefficients(&y, 0.3, 9).unwrap();
    let d = z.iter().zip(&y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    assert!((d - 0.3).abs() < 1e-12);
}

#[test]
fn rate_fit_recovers_a_noisy_power_law() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pairs: Vec<(f64, f64)> = (0..25)
        .map(|k| 10f64.powf(-0.25 * k as f64))
        .map(|d| (d, d.powf(2.0 / 3.0) * (1.0 + rng.random_range(-0.05..0.05))))
        .collect();
    let fit = fit_rate(&pairs).unwrap();
    assert!((fit.slope - 2.0 / 3.0).abs() < 0.05, "{}", fit.slope);
    assert!(fit.r_squared > 0.99);
}

#[test]
fn penalty_gradient_matches_finite_differences() {
    let g = Grid::unit_square(16).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for p in [1.5, 2.0, 3.0] {
        let e = Exponents::new(p).unwrap();
        for _ in 0..5 {
            let w = GridFunction::from_fn(&g, |_| rng.random_range(-1.0..1.0));
            let h = GridFunction::from_fn(&g, |_| rng.random_range(-1.0..1.0));
            let eps = 1e-5;
            let fd = (penalty(&w.axpy(eps, &h).unwrap(), 0.7, &e).unwrap() - penalty(&w, 0.7, &e).unwrap()) / eps;
            let grad = penalty_gradient(&w, 0.7, &e).unwrap();
            let an: f64 = grad.values().iter().zip(h.values()).map(|(a, b)| a * b).sum::<f64>() * g.cell_measure();
            assert!((fd - an).abs() < 0.01 * an.abs(), "p={p}: {fd} vs {an}");
        }
    }
}

fn small_problem(n: usize) -> EllipticProblem {
    let g = Grid::unit_square(n).unwrap();
    let mu = MeasureData {
        interior_masses: vec![PointMass { location: [0.3, 0.6], weight: 0.2 }],
        interior_density: Some(GridFunction::constant(&g, 1.0)),
        boundary_density: MeasureData::uniform_boundary(&g, 0.5),
    };
    EllipticProblem::new(DiffusionField::constant(&g, 1.0).unwrap(), mu, FeasibleSet::new(3.0, 10.0, 0.5, 2).unwrap())
        .unwrap()
}

#[test]
fn exact_data_and_exact_prior_return_the_truth() {
    let pb = small_problem(8);
    let truth = GridFunction::from_fn(pb.grid(), |x| 1.0 + 0.5 * x[0]);
    let u = pb.solve(&truth).unwrap().u;
    let cfg = TikhonovConfig::new(2.0, 1.5, 1e-3, truth.clone());
    let r = solve_nonlinear(&pb, &u, &cfg, &DataNorm::L2, &Parametrization::Pointwise).unwrap();
    assert_eq!(r.objective, 0.0);
    assert!(lp_norm(&(&r.a - &truth), 2.0).unwrap() < 1e-14);
}

#[test]
fn descent_is_monotone_and_feasible() {
    let pb = small_problem(16);
    let truth = GridFunction::from_fn(pb.grid(), |x| 1.0 + 0.8 * (x[0] - 0.5).abs() + 0.3 * x[1]);
    let u = add_noise(&pb.solve(&truth).unwrap().u, 1e-3, &DataNorm::L2, 2).unwrap();
    for (p, norm) in
        [(1.5, DataNorm::L2), (2.0, DataNorm::Sobolev { tau: 2.0 }), (3.0, DataNorm::Lebesgue { tau: 3.0 })]
    {
        let mut cfg = TikhonovConfig::new(2.0, p, 1e-4, GridFunction::constant(pb.grid(), 1.2));
        cfg.max_iterations = 200;
        let r = solve_nonlinear(&pb, &u, &cfg, &norm, &Parametrization::Pointwise).unwrap();
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]), "p={p}");
        assert!(r.objective < r.initial_objective);
        assert!(pb.feasible.contains(&r.a).unwrap());
    }
}

fn objective(pb: &EllipticProblem, a: &GridFunction, u: &GridFunction, a_star: &GridFunction, alpha: f64) -> f64 {
    let e = Exponents::new(1.5).unwrap();
    let r = &pb.solve(a).unwrap().u - u;
    DataNorm::L2.fidelity(&r, 2.0).unwrap() + penalty(&(a - a_star), alpha, &e).unwrap()
}

#[test]
fn piecewise_minimiser_matches_brute_force() {
    let pb = small_problem(8);
    let g = pb.grid().clone();
    // Three vertical strips of widths 3, 3 and 2 cells.
    let labels: Vec<usize> = (0..64).map(|i| [0, 0, 0, 1, 1, 1, 2, 2][i % 8]).collect();
    let expand = |c: &[f64]| GridFunction::new(g.clone(), labels.iter().map(|&l| c[l]).collect()).unwrap();
    let truth = expand(&[1.0, 2.0, 1.5]);
    let u = add_noise(&pb.solve(&truth).unwrap().u, 1e-3, &DataNorm::L2, 8).unwrap();
    let a_star = GridFunction::constant(&g, 1.5);
    let alpha = 1e-4;
    let cfg = TikhonovConfig::new(2.0, 1.5, alpha, a_star.clone());
    let r = solve_nonlinear(&pb, &u, &cfg, &DataNorm::L2, &Parametrization::piecewise(labels.clone())).unwrap();

    let step = 0.025;
    let axis: Vec<f64> = (0..=60).map(|i| 0.75 + step * i as f64).collect();
    let mut best = (f64::INFINITY, [0.0; 3]);
    for &c0 in &axis {
        for &c1 in &axis {
            for &c2 in &axis {
                let f = objective(&pb, &expand(&[c0, c1, c2]), &u, &a_star, alpha);
                if f < best.0 {
                    best = (f, [c0, c1, c2]);
                }
            }
        }
    }
    let found = [r.a.values()[0], r.a.values()[3], r.a.values()[6]];
    for k in 0..3 {
        assert!((found[k] - best.1[k]).abs() <= step, "piece {k}: {found:?} vs {:?}", best.1);
    }
    assert!(r.objective <= best.0 + 1e-12);
}

#[test]
fn errors_decrease_with_the_noise_level() {
    let b = EllipticBenchmark::reference(16).unwrap();
    let setting = b.vsc_setting(3).unwrap();
    let c = b.calibrate(&b.samples(500, 1).unwrap(), &setting).unwrap();
    let model = b.rate_model(c).unwrap();
    let errors: Vec<f64> = (1..=5).map(|k| model.run(10f64.powi(-k), 5).unwrap().error).collect();
    assert!(errors.windows(2).all(|w| w[1] < w[0]), "{errors:?}");
    let alpha = alpha_choice(1e-5, 2.0, &model.psi).unwrap();
    assert!(alpha > 0.0 && alpha < alpha_choice(1e-4, 2.0, &model.psi).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn diagonal_solution_shrinks_toward_zero(seed in any::<u64>(), alpha in 1e-6f64..10.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sigma: Vec<f64> = (0..20).map(|_| rng.random_range(1e-3..2.0)).collect();
        let y: Vec<f64> = (0..20).map(|_| rng.random_range(-3.0..3.0)).collect();
        let x = diagonal_solve(&sigma, &y, alpha).unwrap();
        for k in 0..20 {
            // |x_k| never exceeds the unregularized |y_k / sigma_k|.
            prop_assert!(x[k].abs() <= (y[k] / sigma[k]).abs() * (1.0 + 1e-12));
            prop_assert!(x[k] * y[k] >= 0.0);
        }
    }
}
