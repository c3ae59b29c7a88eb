//! Formal solutions of `x^2 a' + (1 + alpha x) k a = b` and `x a' + k a = b`,
//! and Gevrey-1 growth diagnostics.

use num_complex::Complex64 as C64;
use serde::Serialize;

use super::quad::adaptive;
use super::{borel, BorelKind};
use crate::error::{Error, Result};
use crate::series::UniSeries;

/// Unique formal solution of `x^2 a' + (1 + alpha x) k a = b`, from
/// `k a_n = b_n - (n - 1 + alpha k) a_{n-1}`.
pub fn solve_irregular_ode(b: &UniSeries, k: C64, alpha: C64) -> Result<UniSeries> {
    if k.norm() == 0.0 {
        return Err(Error::SingularOperator("irregular ODE with k = 0".into()));
    }
    let mut a = UniSeries::zero(b.order());
    let mut prev = C64::default();
    for n in 0..b.order() {
        let carry = if n == 0 {
            C64::default()
        } else {
            (C64::new((n - 1) as f64, 0.0) + alpha * k) * prev
        };
        prev = (b.get(n) - carry) / k;
        a.set(n, prev);
    }
    Ok(a)
}

/// Second Borel transform of the solution evaluated at `t` in closed form,
/// `A(t) = B(t)/(t+k) - alpha k (t+k)^{-1-alpha k} int_0^t B(s) (s+k)^{alpha k - 1} ds`
/// with `B = B~(b) - alpha b(0)`, integrating along the segment `[0, t]`.
pub fn solve_irregular_ode_borel(b: &UniSeries, k: C64, alpha: C64, t: C64) -> Result<C64> {
    if k.norm() == 0.0 {
        return Err(Error::SingularOperator("irregular ODE with k = 0".into()));
    }
    let bb = borel(b, BorelKind::Bis);
    let shift = alpha * b.get(0);
    let big_b = |s: C64| bb.eval_taylor(s) - shift;
    let tk = t + k;
    // -k on the segment [0, t] makes the path integral singular
    let along = (-k * t.conj()).re / t.norm_sqr().max(1e-300);
    let off = if t.norm() > 0.0 {
        (-k - t * along.clamp(0.0, 1.0)).norm()
    } else {
        k.norm()
    };
    if off < 1e-12 * (1.0 + k.norm()) {
        return Err(Error::SingularOperator(format!(
            "segment [0, {t}] passes through -k"
        )));
    }
    let ak = alpha * k;
    if ak.norm() == 0.0 {
        return Ok(big_b(t) / tk);
    }
    let integrand = |u: f64| {
        let s = t * u;
        let sk = s + k;
        big_b(s) * (ak * (sk / tk).ln()).exp() / sk * t
    };
    let r = adaptive(&integrand, 0.0, 1.0, 1e-13 * (1.0 + big_b(t).norm()));
    Ok(big_b(t) / tk - ak / tk * r.value)
}

/// Unique formal solution of `x a' + k a = b`: `a_j = b_j / (j + k)`.
pub fn solve_regular_ode(b: &UniSeries, k: C64) -> Result<UniSeries> {
    let mut a = UniSeries::zero(b.order());
    for j in 0..b.order() {
        let den = k + j as f64;
        if den.norm() < 1e-12 {
            return Err(Error::Resonance(j));
        }
        a.set(j, b.get(j) / den);
    }
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GevreyClass {
    Convergent,
    Gevrey1,
}

/// Fit of `|f_k| <= A C^k k!` and the trend of `|f_{k+1}| / (k |f_k|)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GevreyReport {
    pub class: GevreyClass,
    pub a: f64,
    pub c: f64,
    /// Slope of `log(|f_{k+1}| / (k |f_k|))` against `log k`: near 0 for
    /// Gevrey-1 growth, near -1 for geometric growth.
    pub ratio_slope: f64,
    pub last_ratio: f64,
}

fn ln_factorial(k: usize) -> f64 {
    (1..=k).map(|j| (j as f64).ln()).sum()
}

fn linear_fit(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    (my - slope * mx, slope)
}

/// Classify the growth of the coefficients of `f`.
pub fn gevrey_estimate(f: &UniSeries) -> Result<GevreyReport> {
    let tol = 1e-300;
    if f.is_zero(0.0) {
        return Ok(GevreyReport {
            class: GevreyClass::Convergent,
            a: 0.0,
            c: 0.0,
            ratio_slope: f64::NEG_INFINITY,
            last_ratio: 0.0,
        });
    }
    let nz: Vec<(usize, f64)> = f
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > tol)
        .map(|(k, c)| (k, c.norm()))
        .collect();
    if nz.len() < 8 {
        return Err(Error::InsufficientData(format!(
            "{} nonzero coefficients, need 8",
            nz.len()
        )));
    }
    let pts: Vec<(f64, f64)> = nz
        .iter()
        .map(|(k, m)| (*k as f64, m.ln() - ln_factorial(*k)))
        .collect();
    let (ln_a, ln_c) = linear_fit(&pts);
    let ratios: Vec<(f64, f64)> = f
        .coeffs()
        .windows(2)
        .enumerate()
        .skip(1)
        .filter(|(_, w)| w[0].norm() > tol && w[1].norm() > tol)
        .map(|(k, w)| {
            (
                (k as f64).ln(),
                (w[1].norm() / (k as f64 * w[0].norm())).ln(),
            )
        })
        .collect();
    let (ratio_slope, last_ratio) = if ratios.len() >= 3 {
        let tail = &ratios[ratios.len() / 2..];
        let (_, s) = linear_fit(tail);
        (s, tail.last().map(|(_, r)| r.exp()).unwrap_or(0.0))
    } else {
        (f64::NEG_INFINITY, 0.0)
    };
    let class = if ratio_slope < -0.5 {
        GevreyClass::Convergent
    } else {
        GevreyClass::Gevrey1
    };
    Ok(GevreyReport {
        class,
        a: ln_a.exp(),
        c: ln_c.exp(),
        ratio_slope,
        last_ratio,
    })
}
