//! Smooth cut-off used to build dyadic shells.

fn g(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else {
        (-1.0 / t).exp()
    }
}

/// C-infinity cut-off: 1 on `[0, 1]`, 0 on `[2, inf)`, monotone between.
pub fn cutoff(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let t = r - 1.0;
        let a = g(1.0 - t);
        a / (a + g(t))
    }
}

/// Shell `j` of the dyadic partition with `last` shells after the base one.
/// The final shell absorbs everything beyond `2^{last-1}`, so the shells sum
/// to one for every radius.
pub fn shell(j: usize, last: usize, r: f64) -> f64 {
    let at = |k: usize| cutoff(r / 2f64.powi(k as i32));
    match j {
        0 => at(0),
        _ if j == last => 1.0 - at(j - 1),
        _ => at(j) - at(j - 1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.0), 1.0);
        assert_eq!(cutoff(1.0), 1.0);
        assert_eq!(cutoff(2.0), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for k in 0..=1000 {
            let v = cutoff(1.0 + k as f64 / 1000.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn shells_partition_unity() {
        for k in 0..4000 {
            let r = k as f64 * 0.01;
            let s: f64 = (0..=5).map(|j| shell(j, 5, r)).sum();
            assert!((s - 1.0).abs() < 1e-14, "r={r}");
            assert!((0..=5).all(|j| (-1e-15..=1.0 + 1e-15).contains(&shell(j, 5, r))));
        }
    }

    #[test]
    fn shell_supports() {
        for k in 0..4000 {
            let r = k as f64 * 0.01;
            if r >= 2.0 {
                assert_eq!(shell(0, 4, r), 0.0);
            }
            if r <= 2.0 || r >= 8.0 {
                assert_eq!(shell(2, 4, r), 0.0);
            }
            if r <= 4.0 {
                assert_eq!(shell(4, 4, r), 0.0);
            }
        }
    }
}
