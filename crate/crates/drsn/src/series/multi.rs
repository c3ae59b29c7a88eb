use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::dense::Dense;
use super::region::ExactRegion;
use super::uni::UniSeries;
use super::EPS_COEFF;
use crate::error::{Error, Result};

/// Exponent triple of `x^m y1^n1 y2^n2`; ordered lexicographically by `(m, n1, n2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
}

impl MultiIndex {
    pub const fn new(m: usize, n1: usize, n2: usize) -> Self {
        MultiIndex { m, n1, n2 }
    }

    pub fn y_degree(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn is_resonant(&self) -> bool {
        self.n1 == self.n2
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x^{} y1^{} y2^{}", self.m, self.n1, self.n2)
    }
}

/// Sparse truncated series in `(x, y1, y2)` keeping `m < x_order` and
/// `n1 + n2 <= y_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSeries {
    coeffs: BTreeMap<MultiIndex, C64>,
    x_order: usize,
    y_order: usize,
}

/// The three ring operations offered by [`arithmetic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithKind {
    Add,
    Sub,
    Mul,
}

/// Truncated ring operation on two series of identical truncation.
pub fn arithmetic(a: &MultiSeries, b: &MultiSeries, kind: ArithKind) -> Result<MultiSeries> {
    match kind {
        ArithKind::Add => a.checked_add(b),
        ArithKind::Sub => a.checked_sub(b),
        ArithKind::Mul => a.checked_mul(b),
    }
}

impl MultiSeries {
    pub fn zero(x_order: usize, y_order: usize) -> Self {
        MultiSeries {
            coeffs: BTreeMap::new(),
            x_order,
            y_order,
        }
    }

    pub fn from_terms<I>(x_order: usize, y_order: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, C64)>,
    {
        let mut s = MultiSeries::zero(x_order, y_order);
        for (idx, c) in terms {
            s.add_term(idx, c);
        }
        s.prune();
        s
    }

    pub fn monomial(
        x_order: usize,
        y_order: usize,
        m: usize,
        n1: usize,
        n2: usize,
        c: C64,
    ) -> Self {
        MultiSeries::from_terms(x_order, y_order, [(MultiIndex::new(m, n1, n2), c)])
    }

    pub fn constant(x_order: usize, y_order: usize, c: C64) -> Self {
        MultiSeries::monomial(x_order, y_order, 0, 0, 0, c)
    }

    pub fn x(x_order: usize, y_order: usize) -> Self {
        MultiSeries::monomial(x_order, y_order, 1, 0, 0, C64::new(1.0, 0.0))
    }

    pub fn y1(x_order: usize, y_order: usize) -> Self {
        MultiSeries::monomial(x_order, y_order, 0, 1, 0, C64::new(1.0, 0.0))
    }

    pub fn y2(x_order: usize, y_order: usize) -> Self {
        MultiSeries::monomial(x_order, y_order, 0, 0, 1, C64::new(1.0, 0.0))
    }

    /// `v^k = (y1 y2)^k` with coefficient `c`.
    pub fn resonant(x_order: usize, y_order: usize, m: usize, k: usize, c: C64) -> Self {
        MultiSeries::monomial(x_order, y_order, m, k, k, c)
    }

    pub fn x_order(&self) -> usize {
        self.x_order
    }

    pub fn y_order(&self) -> usize {
        self.y_order
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.x_order, self.y_order)
    }

    pub fn fits(&self, idx: &MultiIndex) -> bool {
        idx.m < self.x_order && idx.y_degree() <= self.y_order
    }

    pub fn get(&self, m: usize, n1: usize, n2: usize) -> C64 {
        self.coeffs
            .get(&MultiIndex::new(m, n1, n2))
            .copied()
            .unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &C64)> {
        self.coeffs.iter()
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, idx: MultiIndex, c: C64) {
        if self.fits(&idx) {
            *self.coeffs.entry(idx).or_default() += c;
        }
    }

    fn prune(&mut self) {
        self.coeffs.retain(|_, c| c.norm() >= EPS_COEFF);
    }

    fn check_orders(&self, other: &MultiSeries) -> Result<()> {
        if self.orders() != other.orders() {
            return Err(Error::OrderMismatch(
                self.x_order,
                self.y_order,
                other.x_order,
                other.y_order,
            ));
        }
        Ok(())
    }

    /// Explicit re-truncation to new orders (dropping or zero-padding).
    pub fn with_orders(&self, x_order: usize, y_order: usize) -> MultiSeries {
        MultiSeries::from_terms(x_order, y_order, self.coeffs.iter().map(|(i, c)| (*i, *c)))
    }

    pub fn checked_add(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check_orders(other)?;
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_term(*i, *c);
        }
        out.prune();
        Ok(out)
    }

    pub fn checked_sub(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check_orders(other)?;
        let mut out = self.clone();
        for (i, c) in &other.coeffs {
            out.add_term(*i, -*c);
        }
        out.prune();
        Ok(out)
    }

    pub fn checked_mul(&self, other: &MultiSeries) -> Result<MultiSeries> {
        self.check_orders(other)?;
        if self.len() * other.len() < 4096 {
            let mut out = MultiSeries::zero(self.x_order, self.y_order);
            for (a, ca) in &self.coeffs {
                for (b, cb) in &other.coeffs {
                    out.add_term(
                        MultiIndex::new(a.m + b.m, a.n1 + b.n1, a.n2 + b.n2),
                        ca * cb,
                    );
                }
            }
            out.prune();
            return Ok(out);
        }
        Ok(MultiSeries::from_dense(
            &self.to_dense().mul(&other.to_dense()),
        ))
    }

    pub fn scale(&self, c: C64) -> MultiSeries {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= c;
        }
        out.prune();
        out
    }

    pub fn neg(&self) -> MultiSeries {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn map_terms<F>(&self, mut f: F) -> MultiSeries
    where
        F: FnMut(&MultiIndex, C64) -> Option<(MultiIndex, C64)>,
    {
        MultiSeries::from_terms(
            self.x_order,
            self.y_order,
            self.coeffs.iter().filter_map(|(i, c)| f(i, *c)),
        )
    }

    pub fn filter<F>(&self, mut keep: F) -> MultiSeries
    where
        F: FnMut(&MultiIndex) -> bool,
    {
        self.map_terms(|i, c| keep(i).then_some((*i, c)))
    }

    pub fn deriv_x(&self) -> MultiSeries {
        self.map_terms(|i, c| {
            (i.m > 0).then(|| (MultiIndex::new(i.m - 1, i.n1, i.n2), c * i.m as f64))
        })
    }

    pub fn deriv_y1(&self) -> MultiSeries {
        self.map_terms(|i, c| {
            (i.n1 > 0).then(|| (MultiIndex::new(i.m, i.n1 - 1, i.n2), c * i.n1 as f64))
        })
    }

    pub fn deriv_y2(&self) -> MultiSeries {
        self.map_terms(|i, c| {
            (i.n2 > 0).then(|| (MultiIndex::new(i.m, i.n1, i.n2 - 1), c * i.n2 as f64))
        })
    }

    /// Multiply by the monomial `x^m y1^n1 y2^n2`, truncating.
    pub fn shift(&self, m: usize, n1: usize, n2: usize) -> MultiSeries {
        self.map_terms(|i, c| Some((MultiIndex::new(i.m + m, i.n1 + n1, i.n2 + n2), c)))
    }

    /// Exact division by `y1` (`which = 1`) or `y2`; fails when a term is not divisible.
    pub fn div_y(&self, which: usize) -> Result<MultiSeries> {
        let mut out = MultiSeries::zero(self.x_order, self.y_order);
        for (i, c) in &self.coeffs {
            let e = if which == 1 { i.n1 } else { i.n2 };
            if e == 0 {
                return Err(Error::Shape(format!(
                    "term {i} is not divisible by y{which}"
                )));
            }
            let j = if which == 1 {
                MultiIndex::new(i.m, i.n1 - 1, i.n2)
            } else {
                MultiIndex::new(i.m, i.n1, i.n2 - 1)
            };
            out.coeffs.insert(j, *c);
        }
        Ok(out)
    }

    /// Exact division by `x^m`.
    pub fn div_x_pow(&self, m: usize) -> Result<MultiSeries> {
        let mut out = MultiSeries::zero(self.x_order, self.y_order);
        for (i, c) in &self.coeffs {
            if i.m < m {
                return Err(Error::Shape(format!("term {i} is not divisible by x^{m}")));
            }
            out.coeffs.insert(MultiIndex::new(i.m - m, i.n1, i.n2), *c);
        }
        Ok(out)
    }

    /// Coefficient of `x^m` as a series with `m = 0`.
    pub fn x_coefficient(&self, m: usize) -> MultiSeries {
        self.map_terms(|i, c| (i.m == m).then(|| (MultiIndex::new(0, i.n1, i.n2), c)))
    }

    /// Part of total y-degree exactly `d`.
    pub fn y_homogeneous(&self, d: usize) -> MultiSeries {
        self.filter(|i| i.y_degree() == d)
    }

    /// Coefficient series in `x` of the y-monomial `y1^n1 y2^n2`.
    pub fn y_coefficient(&self, n1: usize, n2: usize) -> UniSeries {
        let mut u = UniSeries::zero(self.x_order);
        for (i, c) in &self.coeffs {
            if i.n1 == n1 && i.n2 == n2 {
                u.set(i.m, *c);
            }
        }
        u
    }

    /// Embed a series in `x` as the coefficient of `y1^n1 y2^n2`.
    pub fn from_uni(u: &UniSeries, y_order: usize, n1: usize, n2: usize) -> MultiSeries {
        let k = u.order();
        MultiSeries::from_terms(
            k,
            y_order,
            u.coeffs()
                .iter()
                .enumerate()
                .map(|(m, c)| (MultiIndex::new(m, n1, n2), *c)),
        )
    }

    /// Multiply every coefficient of a given y-monomial by a series in `x`.
    pub fn mul_uni(&self, u: &UniSeries) -> MultiSeries {
        let mut terms = Vec::new();
        for (i, c) in &self.coeffs {
            for (mu, cu) in u.coeffs().iter().enumerate() {
                terms.push((MultiIndex::new(i.m + mu, i.n1, i.n2), c * cu));
            }
        }
        MultiSeries::from_terms(self.x_order, self.y_order, terms)
    }

    /// Split into resonant (`n1 = n2`) and non-resonant parts.
    pub fn resonant_split(&self) -> (MultiSeries, MultiSeries) {
        (
            self.filter(|i| i.is_resonant()),
            self.filter(|i| !i.is_resonant()),
        )
    }

    pub fn constant_term(&self) -> C64 {
        self.get(0, 0, 0)
    }

    /// Smallest `m` with a nonzero coefficient, `usize::MAX` for zero.
    pub fn x_valuation(&self) -> usize {
        self.coeffs.keys().map(|i| i.m).min().unwrap_or(usize::MAX)
    }

    /// Smallest total y-degree with a nonzero coefficient, `usize::MAX` for zero.
    pub fn y_valuation(&self) -> usize {
        self.coeffs
            .keys()
            .map(|i| i.y_degree())
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Largest total y-degree present (0 for the zero series).
    pub fn y_degree(&self) -> usize {
        self.coeffs.keys().map(|i| i.y_degree()).max().unwrap_or(0)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest coefficient magnitude over the indices inside `region`.
    pub fn max_abs_in(&self, region: &ExactRegion) -> f64 {
        self.coeffs
            .iter()
            .filter(|(i, _)| region.contains(i.m, i.y_degree()))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max)
    }

    /// Coefficientwise equality within `tol`.
    pub fn approx_eq(&self, other: &MultiSeries, tol: f64) -> bool {
        self.orders() == other.orders()
            && self
                .checked_sub(other)
                .map(|d| d.max_abs() <= tol)
                .unwrap_or(false)
    }

    /// Substitution `f(x, g1, g2)` for fibered maps; `g1`, `g2` must have zero
    /// constant term. The result is exact in the region reported by
    /// [`compose_cutoff`](Self::compose_cutoff).
    pub fn compose_fibered(&self, g1: &MultiSeries, g2: &MultiSeries) -> Result<MultiSeries> {
        self.check_orders(g1)?;
        self.check_orders(g2)?;
        for (name, g) in [("g1", g1), ("g2", g2)] {
            let c = g.constant_term();
            if c.norm() > 0.0 {
                return Err(Error::SubstitutionDomain(format!("{name}(0,0,0) = {c}")));
            }
        }
        let out = self
            .to_dense()
            .compose(&g1.to_dense(), &g2.to_dense(), None);
        Ok(MultiSeries::from_dense(&out))
    }

    /// Region where `f(x, g1, g2)` agrees with the untruncated substitution.
    pub fn compose_cutoff(&self, g1: &MultiSeries, g2: &MultiSeries) -> ExactRegion {
        let v1 = g1.filter(|i| i.y_degree() == 0).x_valuation();
        let v2 = g2.filter(|i| i.y_degree() == 0).x_valuation();
        ExactRegion::after_shift(self.x_order, self.y_order, v1.min(v2))
    }

    /// Evaluate the truncated polynomial at a point.
    pub fn eval(&self, x: C64, y1: C64, y2: C64) -> C64 {
        let mut total = C64::default();
        for (i, c) in &self.coeffs {
            total += c * x.powu(i.m as u32) * y1.powu(i.n1 as u32) * y2.powu(i.n2 as u32);
        }
        total
    }

    pub(crate) fn to_dense(&self) -> Dense {
        let mut d = Dense::zeros(self.x_order, self.y_order);
        for (i, c) in &self.coeffs {
            d.set(i.m, i.n1, i.n2, *c);
        }
        d
    }

    pub(crate) fn from_dense(d: &Dense) -> MultiSeries {
        let ny = d.ny();
        let mut out = MultiSeries::zero(d.k, d.d());
        for m in 0..d.k {
            for yi in 0..ny {
                let c = d.data[m * ny + yi];
                if c.norm() >= EPS_COEFF {
                    let (n1, n2) = d.layout.exps[yi];
                    out.coeffs.insert(MultiIndex::new(m, n1, n2), c);
                }
            }
        }
        out
    }
}

impl fmt::Display for MultiSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in &self.coeffs {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({:.6}{:+.6}i) {}", c.re, c.im, i)?;
        }
        Ok(())
    }
}
