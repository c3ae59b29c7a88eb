//! Directional Laplace transform of a continued Borel transform.

use num_complex::Complex64 as C64;

use super::pade::{Continuation, EPS_POLE};
use super::quad::adaptive;
use crate::error::{Error, Result};

/// Absolute tolerance of the Laplace quadrature including the tail.
pub const TOL_QUAD: f64 = 1e-10;

/// Distance from `p` to the ray `e^{i theta} R_{>=0}`.
pub(crate) fn distance_to_ray(p: C64, theta: f64) -> f64 {
    let local = p * C64::from_polar(1.0, -theta);
    if local.re <= 0.0 {
        local.norm()
    } else {
        local.im.abs()
    }
}

/// `int_{e^{i theta} R_+} g(t) exp(-t / x) dt + constant_term`.
pub fn laplace_sum(g: &Continuation, theta: f64, x: C64, constant_term: C64) -> Result<C64> {
    let dir = C64::from_polar(1.0, theta);
    let kappa = (dir / x).re;
    if !(kappa > 0.0) {
        return Err(Error::DivergentIntegral(format!(
            "Re(e^(i theta) / x) = {kappa:.3e} is not positive"
        )));
    }
    let poles = g.poles();
    for p in &poles {
        let distance = distance_to_ray(*p, theta);
        if distance < EPS_POLE {
            return Err(Error::DirectionBlocked { theta, distance });
        }
    }
    let integrand = |r: f64| {
        let t = dir * r;
        g.eval(t) * (-t / x).exp() * dir
    };
    let s = g.growth_degree() as f64;
    let pole_reach = poles
        .iter()
        .map(|p| (p * dir.conj()).re.max(0.0))
        .fold(0.0, f64::max);
    let mut t_max = (4.0 / kappa).max(2.0 * pole_reach);
    let tail = |t: f64| {
        let mag = (0..4)
            .map(|j| g.eval(dir * (t * (1.0 + 0.5 * j as f64))).norm())
            .fold(0.0, f64::max);
        mag * (-kappa * t).exp() / kappa * (1.0 + s / (kappa * t))
    };
    let mut guard = 0;
    while tail(t_max) > 0.1 * TOL_QUAD {
        t_max *= 1.5;
        guard += 1;
        if guard > 200 {
            return Err(Error::DivergentIntegral("tail bound does not decay".into()));
        }
    }
    // split at the decay scale so the adaptive rule sees the boundary layer
    let mut value = C64::default();
    let mut lo = 0.0;
    let mut width = 1.0 / kappa;
    let mut panels = Vec::new();
    while lo < t_max {
        let hi = (lo + width).min(t_max);
        panels.push((lo, hi));
        lo = hi;
        width *= 2.0;
    }
    let share = 0.5 * TOL_QUAD / panels.len() as f64;
    for (a, b) in panels {
        let r = adaptive(&integrand, a, b, share);
        if !r.converged || !r.value.is_finite() {
            return Err(Error::DivergentIntegral(format!(
                "quadrature failed on [{a:.3e}, {b:.3e}]"
            )));
        }
        value += r.value;
    }
    Ok(value + constant_term)
}
