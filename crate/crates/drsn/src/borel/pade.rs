//! Padé approximants as a finite-order stand-in for analytic continuation
//! of Borel transforms.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use serde::Serialize;

use super::BorelSeries;
use crate::error::{Error, Result};

/// Minimal distance between an integration ray and a Padé pole.
pub const EPS_POLE: f64 = 1e-3;

/// Rational function `num(t) / den(t)` with `den(0) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pade {
    pub num: Vec<C64>,
    pub den: Vec<C64>,
}

/// Orders tried and the poles of the accepted approximant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoleReport {
    pub requested: (usize, usize),
    pub used: (usize, usize),
    pub poles: Vec<C64>,
}

fn horner(c: &[C64], t: C64) -> C64 {
    c.iter().rev().fold(C64::default(), |acc, a| acc * t + a)
}

impl Pade {
    pub fn eval(&self, t: C64) -> C64 {
        horner(&self.num, t) / horner(&self.den, t)
    }

    /// Roots of the denominator.
    pub fn poles(&self) -> Vec<C64> {
        polynomial_roots(&self.den)
    }
}

/// Analytic continuation used for Laplace sums and norms.
#[derive(Debug, Clone, PartialEq)]
pub enum Continuation {
    Polynomial(Vec<C64>),
    Rational(Pade),
}

impl Continuation {
    pub fn eval(&self, t: C64) -> C64 {
        match self {
            Continuation::Polynomial(c) => horner(c, t),
            Continuation::Rational(p) => p.eval(t),
        }
    }

    pub fn poles(&self) -> Vec<C64> {
        match self {
            Continuation::Polynomial(_) => Vec::new(),
            Continuation::Rational(p) => p.poles(),
        }
    }

    /// Degree of growth at infinity (`deg num - deg den`, at least 0).
    pub fn growth_degree(&self) -> usize {
        let deg = |c: &[C64]| c.iter().rposition(|a| a.norm() > 0.0).unwrap_or(0);
        match self {
            Continuation::Polynomial(c) => deg(c),
            Continuation::Rational(p) => deg(&p.num).saturating_sub(deg(&p.den)),
        }
    }
}

/// Roots of `sum c_k t^k` as eigenvalues of the companion matrix.
pub(crate) fn polynomial_roots(c: &[C64]) -> Vec<C64> {
    let scale = c.iter().map(|a| a.norm()).fold(0.0, f64::max);
    let Some(top) = c.iter().rposition(|a| a.norm() > 1e-14 * scale) else {
        return Vec::new();
    };
    if top == 0 {
        return Vec::new();
    }
    let lead = c[top];
    let mut m = DMatrix::<C64>::zeros(top, top);
    for i in 1..top {
        m[(i, i - 1)] = C64::new(1.0, 0.0);
    }
    for i in 0..top {
        m[(i, top - 1)] = -c[i] / lead;
    }
    let Some(eig) = m.schur().eigenvalues() else {
        return Vec::new();
    };
    let mut roots: Vec<C64> = eig.iter().copied().collect();
    roots.sort_by(|a, b| a.norm().total_cmp(&b.norm()).then(a.re.total_cmp(&b.re)));
    roots
}

/// `[p/q]` approximant of a coefficient vector; fails when the linear system
/// for the denominator is numerically singular.
fn pade_exact(c: &[C64], p: usize, q: usize) -> Result<Pade> {
    if p + q + 1 > c.len() {
        return Err(Error::InsufficientData(format!(
            "[{p}/{q}] needs {} coefficients, have {}",
            p + q + 1,
            c.len()
        )));
    }
    let at = |i: isize| {
        if i >= 0 {
            c[i as usize]
        } else {
            C64::default()
        }
    };
    let mut den = vec![C64::new(1.0, 0.0)];
    if q > 0 {
        let a = DMatrix::from_fn(q, q, |i, j| at(p as isize + i as isize - j as isize));
        let rhs = DVector::from_fn(q, |i, _| -at((p + i + 1) as isize));
        let scale = a.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1e-300);
        let svd = a.clone().svd(false, false);
        let smin = svd
            .singular_values
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if smin < 1e-12 * scale {
            return Err(Error::SingularPade(p, q));
        }
        let sol = a.lu().solve(&rhs).ok_or(Error::SingularPade(p, q))?;
        den.extend(sol.iter().copied());
    }
    let num = (0..=p)
        .map(|i| (0..=i.min(q)).map(|j| den[j] * c[i - j]).sum())
        .collect();
    Ok(Pade { num, den })
}

/// Padé approximant of order `(p, q)`, falling back to `(p-1, q-1)` while
/// the denominator system is singular.
pub fn pade_continue(g: &BorelSeries, order: (usize, usize)) -> Result<(Pade, PoleReport)> {
    let (mut p, mut q) = order;
    loop {
        match pade_exact(&g.coeffs, p, q) {
            Ok(pade) => {
                let poles = pade.poles();
                return Ok((
                    pade,
                    PoleReport {
                        requested: order,
                        used: (p, q),
                        poles,
                    },
                ));
            }
            Err(Error::SingularPade(..)) if q > 0 && p > 0 => {
                p -= 1;
                q -= 1;
            }
            Err(Error::SingularPade(..)) if q > 0 => q -= 1,
            Err(e) => return Err(e),
        }
    }
}
