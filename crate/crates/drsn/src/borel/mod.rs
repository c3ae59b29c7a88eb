//! Gevrey-1 and 1-summability tools: Borel transforms, convolution,
//! weighted norms, Padé continuation, directional Laplace sums and the two
//! singular linear ODE solvers.

mod laplace;
mod norm;
mod ode;
mod pade;
pub(crate) mod quad;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::UniSeries;

pub use laplace::{laplace_sum, TOL_QUAD};
pub use norm::{
    fact_constant, weighted_norm, weighted_norm_of, Direction, NormKind, NormReport,
    WeightedNormParams,
};
pub use ode::{
    gevrey_estimate, solve_irregular_ode, solve_irregular_ode_borel, solve_regular_ode,
    GevreyClass, GevreyReport,
};
pub use pade::{pade_continue, Continuation, Pade, PoleReport, EPS_POLE};

/// Which Borel transform a coefficient vector represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BorelKind {
    /// `sum f_k t^k / k!`
    B,
    /// `sum f_{k+1} t^k / k!`, constant term carried separately.
    Bis,
}

/// Truncated Taylor series of a Borel transform at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BorelSeries {
    pub coeffs: Vec<C64>,
    pub kind: BorelKind,
    /// `f(0)`, re-added after a Laplace transform of a `Bis` series.
    pub constant: C64,
    pub pade: Option<Pade>,
}

pub(crate) fn factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 1.0;
    out.push(acc);
    for k in 1..=n {
        acc *= k as f64;
        out.push(acc);
    }
    out
}

/// Borel transform of a series in `x`.
pub fn borel(f: &UniSeries, kind: BorelKind) -> BorelSeries {
    let c = f.coeffs();
    let fact = factorials(c.len());
    let coeffs = match kind {
        BorelKind::B => c.iter().enumerate().map(|(k, fk)| fk / fact[k]).collect(),
        BorelKind::Bis => c
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, fk)| fk / fact[k - 1])
            .collect(),
    };
    BorelSeries {
        coeffs,
        kind,
        constant: if kind == BorelKind::Bis {
            f.get(0)
        } else {
            C64::default()
        },
        pade: None,
    }
}

impl BorelSeries {
    /// Recover the series in `x` of the given order.
    pub fn inverse(&self, order: usize) -> UniSeries {
        let fact = factorials(order + 1);
        let mut u = UniSeries::zero(order);
        match self.kind {
            BorelKind::B => {
                for (k, c) in self.coeffs.iter().enumerate() {
                    u.set(k, c * fact[k.min(order)]);
                }
            }
            BorelKind::Bis => {
                u.set(0, self.constant);
                for (k, c) in self.coeffs.iter().enumerate() {
                    u.set(k + 1, c * fact[k.min(order)]);
                }
            }
        }
        u
    }

    /// Evaluate the truncated Taylor polynomial.
    pub fn eval_taylor(&self, t: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::default(), |acc, c| acc * t + c)
    }

    pub fn continuation(&self) -> Continuation {
        match &self.pade {
            Some(p) => Continuation::Rational(p.clone()),
            None => Continuation::Polynomial(self.coeffs.clone()),
        }
    }
}

/// `(g * h)(t) = int_0^t g(s) h(t - s) ds` on Taylor coefficients, truncated
/// to the shorter length.
pub fn convolve(g: &BorelSeries, h: &BorelSeries) -> Result<BorelSeries> {
    if g.kind != BorelKind::Bis || h.kind != BorelKind::Bis {
        return Err(Error::KindMismatch(
            "convolution needs the second Borel transform".into(),
        ));
    }
    let n = g.coeffs.len().min(h.coeffs.len());
    let fact = factorials(2 * n + 2);
    let mut out = vec![C64::default(); n];
    // int_0^t s^i (t-s)^j ds = i! j! / (i+j+1)! t^(i+j+1)
    for (i, gi) in g.coeffs.iter().enumerate().take(n) {
        for (j, hj) in h.coeffs.iter().enumerate().take(n) {
            let e = i + j + 1;
            if e < n {
                out[e] += gi * hj * (fact[i] * fact[j] / fact[e]);
            }
        }
    }
    Ok(BorelSeries {
        coeffs: out,
        kind: BorelKind::Bis,
        constant: C64::default(),
        pade: None,
    })
}
