//! Truncated power series in `(x, y1, y2)` and polynomial vector fields.

pub(crate) mod dense;
mod field;
mod multi;
mod region;
mod uni;

use num_complex::Complex64 as C64;

pub(crate) use field::lie_dense as field_lie_dense;
pub use field::{lie_derivative, lie_derivative_cutoff, PolyVectorField};
pub use multi::{arithmetic, ArithKind, MultiIndex, MultiSeries};
pub use region::ExactRegion;
pub use uni::UniSeries;

use crate::error::{Error, Result};

/// Coefficients below this magnitude are dropped.
pub const EPS_COEFF: f64 = 1e-12;
/// Tolerance for coefficientwise equality assertions.
pub const EPS_EQ: f64 = 1e-9;

/// `f(x, g1(x, y), g2(x, y))` truncated to the common orders.
pub fn compose_fibered(f: &MultiSeries, g1: &MultiSeries, g2: &MultiSeries) -> Result<MultiSeries> {
    f.compose_fibered(g1, g2)
}

/// Split into the part with `n1 = n2` and the rest.
pub fn resonant_split(f: &MultiSeries) -> (MultiSeries, MultiSeries) {
    f.resonant_split()
}

/// Components `(y1 exp(w1 tau), y2 exp(w2 tau))` of the flow of
/// `w1 y1 d/dy1 + w2 y2 d/dy2` at time `tau(x, y)`.
pub fn exp_flow_map(tau: &MultiSeries, weights: (i32, i32)) -> Result<(MultiSeries, MultiSeries)> {
    let c = tau.constant_term();
    if c.norm() > 0.0 {
        return Err(Error::FlowTime(format!("tau(0,0,0) = {c}")));
    }
    let (k, d) = tau.orders();
    let t = tau.to_dense();
    let e1 = t.scaled(C64::new(weights.0 as f64, 0.0)).exp();
    let e2 = t.scaled(C64::new(weights.1 as f64, 0.0)).exp();
    let y1 = MultiSeries::y1(k, d).to_dense();
    let y2 = MultiSeries::y2(k, d).to_dense();
    Ok((
        MultiSeries::from_dense(&y1.mul(&e1)),
        MultiSeries::from_dense(&y2.mul(&e2)),
    ))
}

/// `v = y1 y2` as a series.
pub fn v_monomial(x_order: usize, y_order: usize) -> MultiSeries {
    MultiSeries::resonant(x_order, y_order, 0, 1, C64::new(1.0, 0.0))
}

/// Embed a series `c(v) = sum c_k v^k` (UniSeries indexed by the v-power).
pub fn from_v_series(c: &UniSeries, x_order: usize, y_order: usize) -> MultiSeries {
    MultiSeries::from_terms(
        x_order,
        y_order,
        c.coeffs()
            .iter()
            .enumerate()
            .map(|(k, ck)| (MultiIndex::new(0, k, k), *ck)),
    )
}

/// Resonant coefficients of the `x^0` part as a series in `v`.
pub fn to_v_series(f: &MultiSeries, x_power: usize, v_order: usize) -> UniSeries {
    let mut u = UniSeries::zero(v_order);
    for (i, c) in f.terms() {
        if i.m == x_power && i.is_resonant() {
            u.set(i.n1, *c);
        }
    }
    u
}
