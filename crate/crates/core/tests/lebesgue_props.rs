use lpvsc::lebesgue::{convexity_gap, duality_map, duality_product, estimate_cp, lp_norm, phi_p_apply};
use lpvsc::{Exponents, Grid, GridFunction};
use proptest::prelude::*;

fn grid_fn(values: Vec<f64>) -> GridFunction {
    let grid = Grid::unit_interval(values.len()).unwrap();
    GridFunction::new(grid, values).unwrap()
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0f64..5.0, n)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![Just(1.5), Just(2.0), Just(3.0), Just(4.0), 1.1f64..6.0]
}

proptest! {
    #[test]
    fn pairing_with_duality_map_gives_gauge_power(v in values(32), p in exponent()) {
        let w = grid_fn(v);
        prop_assume!(!w.is_zero());
        let e = Exponents::new(p).unwrap();
        let lhs = duality_product(&w, &duality_map(&w, &e).unwrap()).unwrap();
        let rhs = lp_norm(&w, p).unwrap().powf(e.p_hat);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn duality_map_norm_identity(v in values(32), p in exponent()) {
        let w = grid_fn(v);
        let e = Exponents::new(p).unwrap();
        let lhs = lp_norm(&duality_map(&w, &e).unwrap(), e.q).unwrap();
        let rhs = lp_norm(&w, p).unwrap().powf(e.p_hat - 1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn convexity_gap_is_nonnegative(
        w in values(16),
        y in values(16),
        p in prop_oneof![Just(1.5), Just(2.0), Just(3.0), Just(4.0)],
    ) {
        let (w, y) = (grid_fn(w), grid_fn(y));
        let e = Exponents::new(p).unwrap();
        prop_assert!(convexity_gap(&w, &y, &e, 0.0).unwrap() >= -1e-12);
    }

    #[test]
    fn holder_inequality(f in values(32), g in values(32), p in exponent()) {
        let (f, g) = (grid_fn(f), grid_fn(g));
        let e = Exponents::new(p).unwrap();
        let lhs = duality_product(&f, &g).unwrap().abs();
        let rhs = lp_norm(&f, p).unwrap() * lp_norm(&g, e.q).unwrap();
        prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn duality_map_is_odd(v in values(32), p in exponent()) {
        let w = grid_fn(v);
        let e = Exponents::new(p).unwrap();
        let a = duality_map(&(-&w), &e).unwrap();
        let b = duality_map(&w, &e).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            prop_assert_eq!(*x, -*y);
        }
    }

    #[test]
    fn duality_map_factors_through_power_map(v in values(32), p in exponent()) {
        let w = grid_fn(v);
        let e = Exponents::new(p).unwrap();
        let j = duality_map(&w, &e).unwrap();
        let factor = lp_norm(&w, p).unwrap().powf(e.p_hat - p);
        let phi = phi_p_apply(&w, p).unwrap();
        for (a, b) in j.values().iter().zip(phi.values()) {
            prop_assert!((a - factor * b).abs() <= 1e-10 * (1.0 + a.abs()));
        }
    }
}

#[test]
fn quartic_gap_is_nonnegative_over_many_samples() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
    let grid = Grid::unit_interval(16).unwrap();
    let e = Exponents::new(4.0).unwrap();
    for _ in 0..10_000 {
        let w = GridFunction::from_fn(&grid, |_| rng.random_range(-2.0..2.0));
        let y = GridFunction::from_fn(&grid, |_| rng.random_range(-2.0..2.0));
        let scale = lp_norm(&w, 4.0).unwrap().max(lp_norm(&y, 4.0).unwrap()).powi(4);
        assert!(convexity_gap(&w, &y, &e, 0.0).unwrap() >= -1e-12 * scale);
    }
}

#[test]
fn convexity_constants_regression() {
    // Baselines recorded from the seeded sampler; a change signals that the
    // sampler or the exponent bookkeeping moved.
    for (p, lo, hi) in [(1.5, 0.5, 1.0), (4.0, 0.0, 1.0)] {
        let c = estimate_cp(&Exponents::new(p).unwrap(), 10_000, 2024).unwrap();
        assert!(c > lo && c <= hi, "p={p}: {c}");
    }
}
