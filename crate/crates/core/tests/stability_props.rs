use std::f64::consts::PI;

use lpvsc::elliptic::{dual_h1q_norm, project_feasible, sobolev_norm};
use lpvsc::tikhonov::EllipticBenchmark;
use lpvsc::vsc::Sample;
use lpvsc::GridFunction;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn max_ratio(b: &EllipticBenchmark, samples: &[Sample], order: u8, power: f64) -> f64 {
    let exact = b.problem.solve(&b.truth).unwrap().u;
    samples
        .iter()
        .map(|s| {
            let num = dual_h1q_norm(&(&s.x - &b.truth), 3.0).unwrap();
            let u = b.problem.solve(&s.x).unwrap().u;
            num / sobolev_norm(&(&u - &exact), order, 2.0).unwrap().powf(power)
        })
        .fold(0.0, f64::max)
}

#[test]
fn stability_ratio_is_bounded_under_sample_doubling() {
    let b = EllipticBenchmark::reference(32).unwrap();
    let s = b.samples(400, 21).unwrap();
    let (small, large) = (max_ratio(&b, &s[..200], 1, 1.0), max_ratio(&b, &s, 1, 1.0));
    assert!(small.is_finite() && small > 0.0);
    assert!((large / small - 1.0).abs() < 0.25, "{small} -> {large}");
}

#[test]
fn interpolation_chain_ratio_is_bounded() {
    let b = EllipticBenchmark::reference(32).unwrap();
    let s = b.samples(400, 22).unwrap();
    let (small, large) = (max_ratio(&b, &s[..200], 0, 0.5), max_ratio(&b, &s, 0, 0.5));
    assert!(small.is_finite() && small > 0.0);
    assert!((large / small - 1.0).abs() < 0.25, "{small} -> {large}");
}

/// Random coefficient spread over the whole admissible set, including the
/// lower bound and the norm-ball boundary.
fn broad_coefficient(b: &EllipticBenchmark, rng: &mut ChaCha8Rng) -> GridFunction {
    let c: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let level = rng.random_range(0.0..12.0);
    let raw = GridFunction::from_fn(b.grid(), |x| {
        let wave = c[0] * (PI * x[0]).cos()
            + c[1] * (PI * x[1]).cos()
            + c[2] * (2.0 * PI * x[0]).cos() * (PI * x[1]).cos()
            + c[3] * (3.0 * PI * x[1]).cos()
            + c[4] * (x[0] - c[5]).abs();
        level * (1.0 + 0.8 * wave.tanh())
    });
    project_feasible(&raw, &b.problem.feasible).unwrap()
}

fn max_pair_difference(b: &EllipticBenchmark, pairs: usize, seed: u64) -> [f64; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = [0.0f64; 2];
    for _ in 0..pairs {
        let ua = b.problem.solve(&broad_coefficient(b, &mut rng)).unwrap().u;
        let ub = b.problem.solve(&broad_coefficient(b, &mut rng)).unwrap().u;
        let d = &ua - &ub;
        out[0] = out[0].max(sobolev_norm(&d, 1, 2.0).unwrap());
        out[1] = out[1].max(sobolev_norm(&d, 2, 2.0).unwrap());
    }
    out
}

#[test]
fn solution_differences_are_uniformly_bounded() {
    let b = EllipticBenchmark::reference(32).unwrap();
    let first = max_pair_difference(&b, 100, 5);
    let more = max_pair_difference(&b, 100, 6);
    for k in 0..2 {
        let both = first[k].max(more[k]);
        assert!(first[k].is_finite() && first[k] > 0.0);
        assert!(both / first[k] < 1.25, "order {}: {} -> {}", k + 1, first[k], both);
    }
    // The same bound at half the resolution: the bound does not come from the mesh.
    let coarse = max_pair_difference(&EllipticBenchmark::reference(16).unwrap(), 100, 5);
    for k in 0..2 {
        assert!(coarse[k] / first[k] > 0.5 && coarse[k] / first[k] < 2.0, "{coarse:?} vs {first:?}");
    }
}

#[test]
fn exact_state_is_bounded_away_from_zero() {
    let b = EllipticBenchmark::reference(32).unwrap();
    let u = b.problem.solve(&b.truth).unwrap().u;
    let min = u.values().iter().copied().fold(f64::INFINITY, f64::min);
    assert!(min > 0.5, "min u = {min}");
}
