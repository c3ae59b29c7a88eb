//! Adaptive Gauss–Legendre quadrature of complex-valued functions.

use std::sync::OnceLock;

use num_complex::Complex64 as C64;

const GL_POINTS: usize = 16;

/// Nodes and weights on `[-1, 1]`, by Newton iteration on `P_n`.
fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_POINTS))
}

/// Fixed-order rule on `[a, b]`.
pub(crate) fn gl_panel<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64) -> C64 {
    let (nodes, weights) = rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights)
        .map(|(z, w)| f(mid + half * z) * *w)
        .sum::<C64>()
        * half
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadResult {
    pub value: C64,
    pub converged: bool,
}

/// Bisect panels until each panel agrees with the sum of its halves to a
/// share of `tol`.
pub(crate) fn adaptive<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> QuadResult {
    let mut stack = vec![(a, b, gl_panel(f, a, b), tol, 0usize)];
    let mut value = C64::default();
    let mut converged = true;
    while let Some((lo, hi, whole, t, depth)) = stack.pop() {
        let mid = 0.5 * (lo + hi);
        let left = gl_panel(f, lo, mid);
        let right = gl_panel(f, mid, hi);
        let diff = (left + right - whole).norm();
        if diff <= t || depth >= 40 {
            if diff > t {
                converged = false;
            }
            value += left + right;
        } else {
            stack.push((lo, mid, left, 0.5 * t, depth + 1));
            stack.push((mid, hi, right, 0.5 * t, depth + 1));
        }
    }
    QuadResult { value, converged }
}
