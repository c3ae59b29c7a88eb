//! Weighted sup norms of Borel transforms over `Delta_{theta, delta, rho}`,
//! computed as grid sups.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::pade::{pade_continue, Continuation};
use super::{borel, BorelKind};
use crate::error::{Error, Result};
use crate::series::UniSeries;

/// Sector `|arg t - theta| < delta / 2` together with the disc `|t| < rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Direction {
    pub theta: f64,
    pub delta: f64,
    pub rho: f64,
}

impl Direction {
    pub fn new(theta: f64, delta: f64, rho: f64) -> Result<Self> {
        if !(delta > 0.0 && delta < std::f64::consts::PI) || !(rho > 0.0) {
            return Err(Error::Geometry(format!(
                "direction needs 0 < delta < pi and rho > 0, got {delta}, {rho}"
            )));
        }
        Ok(Direction { theta, delta, rho })
    }

    /// Membership in `Delta_{theta, delta, rho}`.
    pub fn contains(&self, t: C64) -> bool {
        if t.norm() < self.rho {
            return true;
        }
        let rel = (t * C64::from_polar(1.0, -self.theta)).arg();
        rel.abs() < 0.5 * self.delta
    }

    /// Distance from a point outside the domain to the domain.
    pub fn distance(&self, p: C64) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        let to_disc = p.norm() - self.rho;
        let local = p * C64::from_polar(1.0, -self.theta);
        let edge = |phi: f64| {
            let u = C64::from_polar(1.0, phi);
            let s = (local * u.conj()).re;
            if s <= 0.0 {
                local.norm()
            } else {
                (local - u * s).norm()
            }
        };
        to_disc
            .min(edge(0.5 * self.delta))
            .min(edge(-0.5 * self.delta))
    }
}

/// Which weight multiplies the Borel transform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    /// `|B f(t)| exp(-beta |t|)`
    Plain,
    /// `|B~ f(t)| (1 + beta^2 |t|^2) exp(-beta |t|)`
    Bis,
}

impl NormKind {
    pub fn weight(self, beta: f64, r: f64) -> f64 {
        match self {
            NormKind::Plain => (-beta * r).exp(),
            NormKind::Bis => (1.0 + beta * beta * r * r) * (-beta * r).exp(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedNormParams {
    pub beta: f64,
    pub direction: Direction,
    /// Samples per radial and angular axis.
    pub grid: usize,
    /// Padé order for the continuation; the truncated Taylor polynomial is
    /// used when absent.
    pub pade: Option<(usize, usize)>,
}

/// Grid sup together with where it is attained and how much it moved under
/// grid doubling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormReport {
    pub value: f64,
    pub argmax: C64,
    pub cutoff: f64,
    pub refinement_change: f64,
}

/// The constant `2 e^2 / 5 + 5` bounding `int_0^t e^{bu}/(1+b^2u^2) du`.
pub fn fact_constant() -> f64 {
    2.0 * 2f64.exp() / 5.0 + 5.0
}

fn grid_sup<G: Fn(C64) -> C64>(
    g: &G,
    params: &WeightedNormParams,
    kind: NormKind,
    cutoff: f64,
    n: usize,
) -> (f64, C64) {
    let dir = params.direction;
    let beta = params.beta;
    let mut best = (0.0, C64::default());
    let mut visit = |t: C64| {
        let v = g(t).norm() * kind.weight(beta, t.norm());
        if v.is_finite() && v > best.0 {
            best = (v, t);
        }
    };
    visit(C64::default());
    let r_min = (1e-4 / beta).min(0.01 * cutoff);
    let radii: Vec<f64> = (0..n)
        .map(|i| r_min * (cutoff / r_min).powf(i as f64 / (n - 1) as f64))
        .collect();
    let inner = 0.5 * dir.delta * (1.0 - 1e-9);
    for &r in &radii {
        for j in 0..n {
            let u = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
            visit(C64::from_polar(r, dir.theta + inner * u));
        }
    }
    let disc_r = dir.rho * (1.0 - 1e-9);
    for i in 1..=n / 2 {
        let r = disc_r * i as f64 / (n / 2) as f64;
        for j in 0..2 * n {
            visit(C64::from_polar(
                r,
                2.0 * std::f64::consts::PI * j as f64 / (2 * n) as f64,
            ));
        }
    }
    best
}

fn find_cutoff<G: Fn(C64) -> C64>(
    g: &G,
    params: &WeightedNormParams,
    kind: NormKind,
) -> Result<f64> {
    let beta = params.beta;
    let dir = C64::from_polar(1.0, params.direction.theta);
    let mut cutoff = (20.0 / beta).max(2.0 * params.direction.rho);
    let sample = |a: f64, b: f64| {
        (0..64)
            .map(|i| {
                let r = a + (b - a) * i as f64 / 63.0;
                g(dir * r).norm() * kind.weight(beta, r)
            })
            .fold(0.0, f64::max)
    };
    let mut peak = sample(0.0, cutoff);
    for _ in 0..60 {
        let tail = sample(cutoff, 2.0 * cutoff);
        peak = peak.max(tail);
        if tail <= 1e-12 * peak || peak == 0.0 {
            return Ok(cutoff);
        }
        cutoff *= 2.0;
    }
    Err(Error::DivergentIntegral(
        "weighted Borel transform does not decay along the direction".into(),
    ))
}

/// Weighted sup norm of an explicit Borel-plane function.
pub fn weighted_norm_of<G: Fn(C64) -> C64>(
    g: &G,
    params: &WeightedNormParams,
    kind: NormKind,
) -> Result<NormReport> {
    if !(params.beta > 0.0) || params.grid < 8 {
        return Err(Error::Config(format!(
            "norm needs beta > 0 and grid >= 8, got {} and {}",
            params.beta, params.grid
        )));
    }
    let cutoff = find_cutoff(g, params, kind)?;
    let (coarse, _) = grid_sup(g, params, kind, cutoff, params.grid);
    let (fine, argmax) = grid_sup(g, params, kind, cutoff, 2 * params.grid);
    let refinement_change = if fine > 0.0 {
        (fine - coarse).abs() / fine
    } else {
        0.0
    };
    Ok(NormReport {
        value: fine,
        argmax,
        cutoff,
        refinement_change,
    })
}

/// Weighted norm of a series: `Plain` uses `B f`, `Bis` uses `B~ f`.
pub fn weighted_norm(
    f: &UniSeries,
    params: &WeightedNormParams,
    kind: NormKind,
) -> Result<NormReport> {
    if f.is_zero(0.0) {
        return Ok(NormReport {
            value: 0.0,
            argmax: C64::default(),
            cutoff: 0.0,
            refinement_change: 0.0,
        });
    }
    let bk = match kind {
        NormKind::Plain => BorelKind::B,
        NormKind::Bis => BorelKind::Bis,
    };
    let b = borel(f, bk);
    let cont = match params.pade {
        Some(order) => {
            let (p, report) = pade_continue(&b, order)?;
            let d = params.direction;
            if let Some(pole) = report.poles.iter().find(|z| d.contains(**z)) {
                return Err(Error::ContinuationFailure {
                    pole: format!("{pole}"),
                });
            }
            Continuation::Rational(p)
        }
        None => Continuation::Polynomial(b.coeffs.clone()),
    };
    weighted_norm_of(&|t| cont.eval(t), params, kind)
}
