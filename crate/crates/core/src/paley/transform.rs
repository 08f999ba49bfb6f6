//! Separable spectral transforms on [`Grid`]s: the discrete Fourier
//! transform and the orthonormal DCT-II (the eigenbasis of the cell-centred
//! Neumann Laplacian).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lebesgue::Grid;

#[derive(Clone)]
pub(crate) enum Transform {
    Fourier {
        forward: Arc<dyn Fft<f64>>,
        inverse: Arc<dyn Fft<f64>>,
    },
    /// Row-major `n x n` matrix, row `k` is the `k`-th cosine mode.
    Cosine {
        matrix: Arc<Vec<f64>>,
    },
}

impl fmt::Debug for Transform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transform::Fourier { forward, .. } => write!(f, "Fourier({})", forward.len()),
            Transform::Cosine { matrix } => write!(f, "Cosine({})", (matrix.len() as f64).sqrt()),
        }
    }
}

/// Applies `op` to every line of `buf` along `axis`.
fn along_axis(grid: &Grid, buf: &mut [Complex64], axis: usize, mut op: impl FnMut(&mut [Complex64])) {
    let n = grid.points();
    if axis == 0 {
        for line in buf.chunks_exact_mut(n) {
            op(line);
        }
    } else {
        let mut col = vec![Complex64::default(); n];
        for ix in 0..n {
            for iy in 0..n {
                col[iy] = buf[iy * n + ix];
            }
            op(&mut col);
            for iy in 0..n {
                buf[iy * n + ix] = col[iy];
            }
        }
    }
}

fn cosine_apply(matrix: &[f64], line: &mut [Complex64], transpose: bool) {
    let n = line.len();
    let src = line.to_vec();
    for (k, out) in line.iter_mut().enumerate() {
        let mut acc = Complex64::default();
        for (i, &v) in src.iter().enumerate() {
            let c = if transpose { matrix[i * n + k] } else { matrix[k * n + i] };
            acc += v * c;
        }
        *out = acc;
    }
}

impl Transform {
    pub fn fourier(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Transform::Fourier { forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn cosine(n: usize) -> Self {
        let mut m = vec![0.0; n * n];
        for k in 0..n {
            let s = if k == 0 { (1.0 / n as f64).sqrt() } else { (2.0 / n as f64).sqrt() };
            for i in 0..n {
                m[k * n + i] = s * (std::f64::consts::PI * (i as f64 + 0.5) * k as f64 / n as f64).cos();
            }
        }
        Transform::Cosine { matrix: Arc::new(m) }
    }

    pub fn forward(&self, grid: &Grid, buf: &mut [Complex64]) {
        for axis in 0..grid.dim() {
            match self {
                Transform::Fourier { forward, .. } => along_axis(grid, buf, axis, |l| forward.process(l)),
                Transform::Cosine { matrix } => along_axis(grid, buf, axis, |l| cosine_apply(matrix, l, false)),
            }
        }
    }

    pub fn inverse(&self, grid: &Grid, buf: &mut [Complex64]) {
        for axis in 0..grid.dim() {
            match self {
                Transform::Fourier { inverse, .. } => along_axis(grid, buf, axis, |l| inverse.process(l)),
                Transform::Cosine { matrix } => along_axis(grid, buf, axis, |l| cosine_apply(matrix, l, true)),
            }
        }
        if let Transform::Fourier { .. } = self {
            let scale = 1.0 / buf.len() as f64;
            buf.iter_mut().for_each(|v| *v *= scale);
        }
    }
}

/// Signed integer frequency of DFT index `k` on `n` points, in `[-n/2, n/2)`.
pub(crate) fn signed_frequency(k: usize, n: usize) -> f64 {
    if k < n / 2 {
        k as f64
    } else {
        k as f64 - n as f64
    }
}

/// Euclidean length of the integer frequency vector at flat index `idx`.
pub(crate) fn frequency_radius(grid: &Grid, idx: usize) -> f64 {
    let n = grid.points();
    let (kx, ky) = grid.multi_index(idx);
    let fx = signed_frequency(kx, n);
    let fy = if grid.dim() == 2 { signed_frequency(ky, n) } else { 0.0 };
    fx.hypot(fy)
}

/// Eigenvalue of the discrete Neumann operator `-Laplace + I` for the cosine
/// mode at flat index `idx`.
pub(crate) fn neumann_eigenvalue(grid: &Grid, idx: usize) -> f64 {
    let n = grid.points() as f64;
    let (kx, ky) = grid.multi_index(idx);
    let mode = |k: usize, axis: usize| {
        let h = grid.spacing(axis);
        4.0 / (h * h) * (std::f64::consts::PI * k as f64 / (2.0 * n)).sin().powi(2)
    };
    let mut lam = 1.0 + mode(kx, 0);
    if grid.dim() == 2 {
        lam += mode(ky, 1);
    }
    lam
}
