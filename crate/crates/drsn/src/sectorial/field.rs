//! A prepared saddle-node `Y0 + D C + R R` in the rotated chart where
//! `lambda = 1`, with fast point evaluators for the flow.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::normalization::decompose;
use crate::saddle_node::SaddleNodeField;
use crate::series::{MultiSeries, UniSeries};

/// Largest exponent the point evaluator accepts.
const MAX_EXPONENT: usize = 64;

/// Sparse polynomial ready for repeated evaluation.
#[derive(Debug, Clone, Default)]
pub(crate) struct PolyEval {
    terms: Vec<(usize, usize, usize, C64)>,
}

impl PolyEval {
    fn new(s: &MultiSeries) -> Self {
        PolyEval {
            terms: s.terms().map(|(i, c)| (i.m, i.n1, i.n2, *c)).collect(),
        }
    }

    fn eval(&self, p: &Powers) -> C64 {
        self.terms
            .iter()
            .map(|&(m, n1, n2, c)| c * p.x[m] * p.y1[n1] * p.y2[n2])
            .sum()
    }
}

/// Powers of the coordinates up to the degrees a field needs.
pub(crate) struct Powers {
    x: [C64; MAX_EXPONENT],
    y1: [C64; MAX_EXPONENT],
    y2: [C64; MAX_EXPONENT],
}

impl Powers {
    fn new(p: [C64; 3], mx: usize, my: usize) -> Self {
        let one = C64::new(1.0, 0.0);
        let mut out = Powers {
            x: [one; MAX_EXPONENT],
            y1: [one; MAX_EXPONENT],
            y2: [one; MAX_EXPONENT],
        };
        for k in 1..=mx {
            out.x[k] = out.x[k - 1] * p[0];
        }
        for k in 1..=my {
            out.y1[k] = out.y1[k - 1] * p[1];
            out.y2[k] = out.y2[k - 1] * p[2];
        }
        out
    }
}

/// Values of the field data at a point of the rotated chart.
#[derive(Debug, Clone, Copy)]
pub struct FieldValues {
    /// Tangential part `C(x, y)`.
    pub c: C64,
    /// Radial part `x R1(x, y)`.
    pub r: C64,
    /// `C - c(v)`, the part of `C` that is not a function of `v` alone.
    pub d: C64,
    /// `1 + b x + C`.
    pub den: C64,
}

/// Prepared field in the chart `X = x / lambda`, where it reads
/// `Z = Y / lambda = X^2 d/dX + y1(-(1 + C) + a1 X + R) d/dy1 + y2(1 + C + a2 X + R) d/dy2`.
#[derive(Debug, Clone)]
pub struct SectorialField {
    lambda: C64,
    a1: C64,
    a2: C64,
    order: usize,
    tangential: MultiSeries,
    radial: MultiSeries,
    resonant: UniSeries,
    c_eval: PolyEval,
    r_eval: PolyEval,
    d_eval: PolyEval,
    max_x: usize,
    max_y: usize,
}

fn rotate_series(s: &MultiSeries, lambda: C64) -> MultiSeries {
    let inv = lambda.inv();
    s.map_terms(|i, c| Some((*i, c * lambda.powu(i.m as u32) * inv)))
}

impl SectorialField {
    /// Read a field normalized up to order `n + 2` in x: the tangential part
    /// is `c(v) + O(x^{n+2})` and the radial part is `O(x^{n+2})`.
    pub fn from_prepared(y: &SaddleNodeField, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("sectorial order N must be at least 1".into()));
        }
        let a = y.a1 + y.a2;
        if a.re <= 0.0 {
            return Err(Error::Config(format!(
                "Re(a1 + a2) = {:.3e} is not positive",
                a.re
            )));
        }
        let (k, d) = y.orders();
        let scale = y.field.max_abs().max(1.0);
        let (dd, rr) = decompose(y, 1e-12 * scale)?;
        let tol = 1e-8 * scale;
        let nonres0 = dd.filter(|i| i.m == 0 && !i.is_resonant()).max_abs();
        let low_d = dd.filter(|i| i.m >= 1 && i.m < n + 2).max_abs();
        let low_r = rr.filter(|i| i.m < n + 2).max_abs();
        let worst = nonres0.max(low_d).max(low_r);
        if worst > tol {
            return Err(Error::Invariant(format!(
                "field is not prepared at order {} (defect {worst:.3e})",
                n + 2
            )));
        }
        let dd = dd.filter(|i| i.m > 0 || i.is_resonant());
        let rr = rr.filter(|i| i.m >= n + 2);
        let mut resonant = UniSeries::zero(d / 2 + 1);
        for (i, c) in dd.terms() {
            if i.m == 0 {
                resonant.set(i.n1, *c / y.lambda);
            }
        }
        Self::assemble(
            y.lambda,
            y.a1,
            y.a2,
            n,
            rotate_series(&dd, y.lambda).with_orders(k, d),
            rotate_series(&rr, y.lambda).with_orders(k, d),
            resonant,
        )
    }

    /// The model `Y0` with `C = R = 0`.
    pub fn model(lambda: C64, a1: C64, a2: C64) -> Result<Self> {
        if (a1 + a2).re <= 0.0 {
            return Err(Error::Config("Re(a1 + a2) must be positive".into()));
        }
        if lambda.norm() == 0.0 {
            return Err(Error::Config("lambda must be nonzero".into()));
        }
        Self::assemble(
            lambda,
            a1,
            a2,
            1,
            MultiSeries::zero(1, 1),
            MultiSeries::zero(1, 1),
            UniSeries::zero(1),
        )
    }

    fn assemble(
        lambda: C64,
        a1: C64,
        a2: C64,
        order: usize,
        tangential: MultiSeries,
        radial: MultiSeries,
        resonant: UniSeries,
    ) -> Result<Self> {
        let (k, d) = tangential.orders();
        if k >= MAX_EXPONENT || d >= MAX_EXPONENT {
            return Err(Error::Shape(format!(
                "orders ({k}, {d}) exceed the evaluator limit {MAX_EXPONENT}"
            )));
        }
        let non_v = tangential.filter(|i| i.m > 0 || !i.is_resonant());
        Ok(SectorialField {
            lambda,
            a1,
            a2,
            order,
            c_eval: PolyEval::new(&tangential),
            r_eval: PolyEval::new(&radial),
            d_eval: PolyEval::new(&non_v),
            tangential,
            radial,
            resonant,
            max_x: k.saturating_sub(1),
            max_y: d,
        })
    }

    pub fn lambda(&self) -> C64 {
        self.lambda
    }

    pub fn a1(&self) -> C64 {
        self.a1
    }

    pub fn a2(&self) -> C64 {
        self.a2
    }

    /// Residue `a = a1 + a2`.
    pub fn a(&self) -> C64 {
        self.a1 + self.a2
    }

    /// `b = (a2 - a1) / 2`.
    pub fn b(&self) -> C64 {
        (self.a2 - self.a1) * 0.5
    }

    /// The `N` of the preparation at order `N + 2`.
    pub fn order(&self) -> usize {
        self.order
    }

    /// Tangential part in the rotated chart.
    pub fn tangential(&self) -> &MultiSeries {
        &self.tangential
    }

    /// Radial part in the rotated chart.
    pub fn radial(&self) -> &MultiSeries {
        &self.radial
    }

    /// `c(v)` in the rotated chart.
    pub fn resonant(&self) -> &UniSeries {
        &self.resonant
    }

    /// Whether `D = c(v)` and `R = 0`, i.e. the field is already normal.
    pub fn is_normal(&self, tol: f64) -> bool {
        self.tangential
            .filter(|i| i.m > 0 || !i.is_resonant())
            .max_abs()
            <= tol
            && self.radial.max_abs() <= tol
    }

    /// `(x, y1, y2) -> (x / lambda, y1, y2)`.
    pub fn rotate(&self, p: [C64; 3]) -> [C64; 3] {
        [p[0] / self.lambda, p[1], p[2]]
    }

    pub fn unrotate(&self, p: [C64; 3]) -> [C64; 3] {
        [p[0] * self.lambda, p[1], p[2]]
    }

    /// `c(w)` in the rotated chart.
    pub fn c_of(&self, w: C64) -> C64 {
        self.resonant.eval(w)
    }

    /// Field data at a point of the rotated chart.
    pub fn values(&self, q: [C64; 3]) -> FieldValues {
        let pw = Powers::new(q, self.max_x, self.max_y);
        let c = self.c_eval.eval(&pw);
        let r = self.r_eval.eval(&pw);
        let d = self.d_eval.eval(&pw);
        FieldValues {
            c,
            r,
            d,
            den: C64::new(1.0, 0.0) + self.b() * q[0] + c,
        }
    }

    /// `Z(q)` in the rotated chart.
    pub fn z(&self, q: [C64; 3]) -> [C64; 3] {
        let v = self.values(q);
        let one = C64::new(1.0, 0.0);
        [
            q[0] * q[0],
            q[1] * (-(one + v.c) + self.a1 * q[0] + v.r),
            q[2] * (one + v.c + self.a2 * q[0] + v.r),
        ]
    }

    /// `Y(p)` in the original chart.
    pub fn y(&self, p: [C64; 3]) -> [C64; 3] {
        let z = self.z(self.rotate(p));
        [
            z[0] * self.lambda * self.lambda,
            z[1] * self.lambda,
            z[2] * self.lambda,
        ]
    }
}
