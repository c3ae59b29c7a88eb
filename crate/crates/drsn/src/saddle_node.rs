//! Diagonal doubly-resonant saddle-nodes: spectral data, classification and
//! preparation of the restriction to `{x = 0}`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::ConjugacyMap;
use crate::series::{MultiSeries, PolyVectorField, UniSeries};

/// Tolerance on the obstruction to the form `(lambda + h) C`.
pub const EPS_OBSTRUCTION: f64 = 1e-8;
/// Distance below which the residue counts as a non-positive rational.
pub const EPS_RES: f64 = 1e-9;
/// Denominator bound of the rational-membership test.
pub const Q_MAX: u32 = 64;

/// A vector field `x^2 d/dx + f1 d/dy1 + f2 d/dy2` with its spectral data.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleNodeField {
    pub field: PolyVectorField,
    pub lambda: C64,
    pub a1: C64,
    pub a2: C64,
    pub residue: C64,
}

/// Classification by the residue.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Degenerate,
    NonDegenerate,
    StrictlyNonDegenerate,
}

/// The fields `C`, `R` and `Y0` attached to `(lambda, a1, a2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisFields {
    pub c_basis: PolyVectorField,
    pub r_basis: PolyVectorField,
    pub y0: PolyVectorField,
}

impl BasisFields {
    pub fn new(x_order: usize, y_order: usize, lambda: C64, a1: C64, a2: C64) -> Self {
        BasisFields {
            c_basis: PolyVectorField::c_basis(x_order, y_order),
            r_basis: PolyVectorField::r_basis(x_order, y_order),
            y0: PolyVectorField::model(x_order, y_order, lambda, a1, a2),
        }
    }
}

fn linear_block(field: &PolyVectorField, m: usize) -> [[C64; 2]; 2] {
    [
        [field.comp_y1.get(m, 1, 0), field.comp_y1.get(m, 0, 1)],
        [field.comp_y2.get(m, 1, 0), field.comp_y2.get(m, 0, 1)],
    ]
}

fn check_x_component(field: &PolyVectorField) -> Result<()> {
    let (k, d) = field.orders();
    let x2 = MultiSeries::monomial(k, d, 2, 0, 0, C64::new(1.0, 0.0));
    if !field.comp_x.approx_eq(&x2, 0.0) {
        return Err(Error::NotASaddleNode(format!(
            "x-component is {} instead of x^2",
            field.comp_x
        )));
    }
    Ok(())
}

impl SaddleNodeField {
    /// Wrap a field whose constant linear part is already `diag(-lambda, lambda)`.
    pub fn from_diagonal(field: PolyVectorField) -> Result<Self> {
        check_x_component(&field)?;
        let l = linear_block(&field, 0);
        let lambda = l[1][1];
        if lambda.norm() < EPS_RES
            || (l[0][0] + lambda).norm() > EPS_RES
            || l[0][1].norm() > EPS_RES
            || l[1][0].norm() > EPS_RES
        {
            return Err(Error::NotASaddleNode(format!(
                "constant linear part [[{}, {}], [{}, {}]] is not diag(-l, l)",
                l[0][0], l[0][1], l[1][0], l[1][1]
            )));
        }
        let a1 = field.comp_y1.get(1, 1, 0);
        let a2 = field.comp_y2.get(1, 0, 1);
        Ok(SaddleNodeField {
            field,
            lambda,
            a1,
            a2,
            residue: a1 + a2,
        })
    }

    pub fn orders(&self) -> (usize, usize) {
        self.field.orders()
    }

    pub fn with_field(&self, field: PolyVectorField) -> SaddleNodeField {
        SaddleNodeField {
            field,
            ..self.clone()
        }
    }
}

/// `(Tr A(x) / x)` at `x = 0`, where `A(x)` is the linear y-part.
pub fn residue(y: &SaddleNodeField) -> C64 {
    trace_residue(&y.field)
}

fn trace_residue(field: &PolyVectorField) -> C64 {
    field.comp_y1.get(1, 1, 0) + field.comp_y2.get(1, 0, 1)
}

/// Classify by the residue: non-positive rationals with denominator at most
/// [`Q_MAX`] are degenerate.
pub fn classify(y: &SaddleNodeField) -> Classification {
    classify_residue(y.residue)
}

pub fn classify_residue(res: C64) -> Classification {
    if res.im.abs() <= EPS_RES && res.re <= EPS_RES {
        for q in 1..=Q_MAX {
            let p = (-res.re * q as f64).round();
            if p >= 0.0 && (res.re + p / q as f64).abs() <= EPS_RES {
                return Classification::Degenerate;
            }
        }
    }
    if res.re > 0.0 {
        Classification::StrictlyNonDegenerate
    } else {
        Classification::NonDegenerate
    }
}

/// Set `x = 0` in the y-components; the result has x-order 1.
pub fn restrict_to_x0(y: &SaddleNodeField) -> (MultiSeries, MultiSeries) {
    restrict_field(&y.field)
}

pub(crate) fn restrict_field(field: &PolyVectorField) -> (MultiSeries, MultiSeries) {
    let d = field.comp_y1.y_order();
    (
        field.comp_y1.x_coefficient(0).with_orders(1, d),
        field.comp_y2.x_coefficient(0).with_orders(1, d),
    )
}

/// Bring the constant linear y-part to `diag(-lambda, lambda)` by a linear
/// change of coordinates of unit determinant.
pub fn diagonalize_constant_linear_part(
    y: &PolyVectorField,
) -> Result<(SaddleNodeField, ConjugacyMap)> {
    check_x_component(y)?;
    let (k, d) = y.orders();
    let l = linear_block(y, 0);
    let tr = l[0][0] + l[1][1];
    let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
    let mut lambda = (-det).sqrt();
    if lambda.norm() < EPS_RES || tr.norm() > EPS_RES * lambda.norm().max(1.0) {
        return Err(Error::NotASaddleNode(format!(
            "eigenvalues are not opposite and nonzero (trace {tr}, det {det})"
        )));
    }
    if lambda.re < 0.0 || (lambda.re == 0.0 && lambda.im < 0.0) {
        lambda = -lambda;
    }
    let off = l[0][1].norm() + l[1][0].norm();
    if off <= EPS_RES {
        if (l[0][0] + lambda).norm() <= EPS_RES {
            let field = SaddleNodeField::from_diagonal(y.clone())?;
            let mut map = ConjugacyMap::identity(k, d);
            map.provenance.push("diagonalize".into());
            return Ok((field, map));
        }
        // swap y1 and y2: determinant -1 is corrected by a sign on y2
        let p = [
            [C64::new(0.0, 0.0), C64::new(-1.0, 0.0)],
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
        ];
        return apply_linear(y, p, lambda);
    }
    let eig = |mu: C64| -> [C64; 2] {
        if l[0][1].norm() >= l[1][0].norm() {
            [C64::new(1.0, 0.0), (mu - l[0][0]) / l[0][1]]
        } else {
            [(mu - l[1][1]) / l[1][0], C64::new(1.0, 0.0)]
        }
    };
    let vm = eig(-lambda);
    let mut vp = eig(lambda);
    let det_p = vm[0] * vp[1] - vp[0] * vm[1];
    vp = [vp[0] / det_p, vp[1] / det_p];
    let p = [[vm[0], vp[0]], [vm[1], vp[1]]];
    apply_linear(y, p, lambda)
}

/// Push forward by `y_new = P^{-1} y_old` where `P` has unit determinant.
fn apply_linear(
    y: &PolyVectorField,
    p: [[C64; 2]; 2],
    lambda: C64,
) -> Result<(SaddleNodeField, ConjugacyMap)> {
    let (k, d) = y.orders();
    let y1 = MultiSeries::y1(k, d);
    let y2 = MultiSeries::y2(k, d);
    let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
    let pi = [
        [p[1][1] / det, -p[0][1] / det],
        [-p[1][0] / det, p[0][0] / det],
    ];
    let lin = |m: [[C64; 2]; 2], row: usize| -> Result<MultiSeries> {
        y1.scale(m[row][0]).checked_add(&y2.scale(m[row][1]))
    };
    let map = ConjugacyMap::new(lin(pi, 0)?, lin(pi, 1)?, "diagonalize")?
        .with_inverse(lin(p, 0)?, lin(p, 1)?);
    let pushed = map.push_forward(y)?;
    let mut field = SaddleNodeField::from_diagonal(pushed)?;
    field.lambda = lambda;
    Ok((field, map))
}

/// Reciprocal of a series with nonzero constant term.
pub(crate) fn recip(f: &MultiSeries) -> Result<MultiSeries> {
    let c0 = f.constant_term();
    if c0.norm() == 0.0 {
        return Err(Error::SingularOperator(
            "reciprocal of a series vanishing at 0".into(),
        ));
    }
    let (k, d) = f.orders();
    let p = f
        .checked_sub(&MultiSeries::constant(k, d, c0))?
        .scale(-c0.inv())
        .to_dense();
    let mut out = crate::series::dense::Dense::constant(k, d, C64::new(1.0, 0.0));
    let mut term = out.clone();
    for _ in 0..(k + d) {
        term = term.mul(&p);
        if term.is_zero() {
            break;
        }
        out.add_assign(&term);
    }
    out.scale(c0.inv());
    Ok(MultiSeries::from_dense(&out))
}

/// Output of [`orbital_linearize_x0`].
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalLinearization {
    /// Non-resonant flow time (plus any requested resonant part).
    pub gamma: MultiSeries,
    /// `d(v)` with the unit `lambda + d(v)` of the linearized restriction.
    pub d: UniSeries,
    /// Unit `U = lambda + h` read off the restriction.
    pub unit: MultiSeries,
}

/// Unit `U` with `(f1, f2) = U (-y1, y2)`, or the obstruction size.
pub fn c_basis_unit(f1: &MultiSeries, f2: &MultiSeries) -> std::result::Result<MultiSeries, f64> {
    let divisible = |f: &MultiSeries, which: usize| {
        f.filter(|i| if which == 1 { i.n1 == 0 } else { i.n2 == 0 })
            .max_abs()
    };
    let bad = divisible(f1, 1).max(divisible(f2, 2));
    if bad > EPS_OBSTRUCTION {
        return Err(bad);
    }
    let u1 = f1
        .filter(|i| i.n1 > 0)
        .div_y(1)
        .map_err(|_| f64::INFINITY)?
        .neg();
    let u2 = f2
        .filter(|i| i.n2 > 0)
        .div_y(2)
        .map_err(|_| f64::INFINITY)?;
    let gap = u1.checked_sub(&u2).map_err(|_| f64::INFINITY)?.max_abs();
    if gap > EPS_OBSTRUCTION {
        return Err(gap);
    }
    Ok(u2)
}

/// Orbital linearization of a restriction `(lambda + h(y)) C` with `h(0) = 0`.
///
/// Solves `L_C(gamma) = 1 - W / U` degree by degree, absorbing the resonant
/// part into the unit `W = lambda + d(v)`. The new coordinates are
/// `(y1 exp(gamma), y2 exp(-gamma))`, so `(y1 exp(-gamma), y2 exp(gamma))`
/// expresses the old coordinates to first order. `gamma_res` adds an
/// arbitrary resonant part `sum g_k v^k` to `gamma` (the kernel of `L_C`).
pub fn orbital_linearize_x0(
    f1: &MultiSeries,
    f2: &MultiSeries,
    gamma_res: Option<&UniSeries>,
) -> Result<OrbitalLinearization> {
    let d_max = f1.y_order();
    let unit = c_basis_unit(f1, f2).map_err(|obstruction| Error::NotDivIntegrable {
        degree: 0,
        obstruction,
    })?;
    let unit = unit.with_orders(1, d_max);
    let lambda = unit.constant_term();
    if lambda.norm() < EPS_RES {
        return Err(Error::NotASaddleNode("unit vanishes at the origin".into()));
    }
    let inv_u = recip(&unit)?;
    let mut w = MultiSeries::constant(1, d_max, lambda);
    let mut gamma_terms = Vec::new();
    for deg in 1..=d_max {
        let q = w.checked_mul(&inv_u)?.y_homogeneous(deg);
        if deg % 2 == 0 {
            let j = deg / 2;
            let wj = -lambda * q.get(0, j, j);
            if wj.norm() > 0.0 {
                w = w.checked_add(&MultiSeries::resonant(1, d_max, 0, j, wj))?;
            }
        }
        for (i, c) in q.terms() {
            if !i.is_resonant() {
                let k = i.n2 as f64 - i.n1 as f64;
                gamma_terms.push((*i, -*c / k));
            }
        }
    }
    let mut gamma = MultiSeries::from_terms(1, d_max, gamma_terms);
    if let Some(g) = gamma_res {
        for (k, c) in g.coeffs().iter().enumerate().skip(1) {
            if 2 * k <= d_max {
                gamma = gamma.checked_add(&MultiSeries::resonant(1, d_max, 0, k, *c))?;
            }
        }
    }
    let mut d = UniSeries::zero(d_max / 2 + 1);
    for (i, c) in w.terms() {
        if i.n1 > 0 {
            d.set(i.n1, *c);
        }
    }
    Ok(OrbitalLinearization { gamma, d, unit })
}

/// Poincaré–Dulac preparation of a restriction whose linear part is
/// `diag(-lambda, lambda)`: returns the map `z = y + P(y)` (x-order 1) and
/// the resulting series `A(v)`, `B(v)` with new components
/// `y1 (-lambda + A(v))`, `y2 (lambda + B(v))`.
pub fn poincare_dulac_x0(
    f1: &MultiSeries,
    f2: &MultiSeries,
    lambda: C64,
) -> Result<(ConjugacyMap, UniSeries, UniSeries)> {
    let d_max = f1.y_order();
    let mut field = PolyVectorField::new(MultiSeries::zero(1, d_max), f1.clone(), f2.clone())?;
    let mut total = ConjugacyMap::identity(1, d_max);
    total.provenance.push("x0-normal-form".into());
    for deg in 2..=d_max {
        let mut p = [Vec::new(), Vec::new()];
        for (j, comp) in [&field.comp_y1, &field.comp_y2].into_iter().enumerate() {
            let sigma = if j == 0 { -1.0 } else { 1.0 };
            for (i, c) in comp.y_homogeneous(deg).terms() {
                let div = i.n2 as f64 - i.n1 as f64 - sigma;
                if div != 0.0 {
                    p[j].push((*i, -*c / (lambda * div)));
                }
            }
        }
        if p[0].is_empty() && p[1].is_empty() {
            continue;
        }
        let [p1, p2] = p;
        let c1 = MultiSeries::y1(1, d_max).checked_add(&MultiSeries::from_terms(1, d_max, p1))?;
        let c2 = MultiSeries::y2(1, d_max).checked_add(&MultiSeries::from_terms(1, d_max, p2))?;
        let step = ConjugacyMap::new(c1, c2, "x0-normal-form")?;
        field = step.push_forward(&field)?;
        let mut next = total.then(&step)?;
        next.provenance = total.provenance.clone();
        total = next;
    }
    let res1 = field.comp_y1.filter(|i| i.n1 != i.n2 + 1);
    let res2 = field.comp_y2.filter(|i| i.n2 != i.n1 + 1);
    let leftover = res1.max_abs().max(res2.max_abs());
    if leftover > EPS_OBSTRUCTION {
        return Err(Error::Invariant(format!(
            "Poincaré–Dulac left non-resonant terms of size {leftover:.3e}"
        )));
    }
    let mut a = UniSeries::zero(d_max / 2 + 1);
    let mut b = UniSeries::zero(d_max / 2 + 1);
    for (i, c) in field.comp_y1.terms() {
        if i.n1 == i.n2 + 1 && i.n2 > 0 {
            a.set(i.n2, *c);
        }
    }
    for (i, c) in field.comp_y2.terms() {
        if i.n2 == i.n1 + 1 && i.n1 > 0 {
            b.set(i.n1, *c);
        }
    }
    Ok((total, a, b))
}
