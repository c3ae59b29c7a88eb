//! Radial and tangential normalization steps up to a prescribed order in x.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::ConjugacyMap;
use crate::saddle_node::{recip, SaddleNodeField};
use crate::series::{exp_flow_map, from_v_series, MultiSeries, PolyVectorField, UniSeries};

/// Denominators of the `tau0` / `sigma0` recursions below this are treated
/// as a degenerate residue.
const EPS_DENOMINATOR: f64 = 1e-9;

/// Units `A_j = f_j / y_j`, dropping non-divisible noise below `tol`.
pub(crate) fn units(field: &PolyVectorField, tol: f64) -> Result<(MultiSeries, MultiSeries)> {
    let split = |f: &MultiSeries, which: usize| -> Result<MultiSeries> {
        let bad = f.filter(|i| if which == 1 { i.n1 == 0 } else { i.n2 == 0 });
        if bad.max_abs() > tol {
            return Err(Error::Invariant(format!(
                "component {which} is not divisible by y{which} (residual {:.3e})",
                bad.max_abs()
            )));
        }
        f.filter(|i| if which == 1 { i.n1 > 0 } else { i.n2 > 0 })
            .div_y(which)
    };
    Ok((split(&field.comp_y1, 1)?, split(&field.comp_y2, 2)?))
}

/// Tangential and radial parts `(D, R)` of a field `Y0 + D C + R R`.
pub(crate) fn decompose(y: &SaddleNodeField, tol: f64) -> Result<(MultiSeries, MultiSeries)> {
    let (k, d) = y.orders();
    let (u1, u2) = units(&y.field, tol)?;
    let half = C64::new(0.5, 0.0);
    let lin = |c: C64| MultiSeries::monomial(k, d, 1, 0, 0, c);
    let dd = u2
        .checked_sub(&u1)?
        .checked_sub(&MultiSeries::constant(k, d, y.lambda * 2.0))?
        .checked_sub(&lin(y.a2 - y.a1))?
        .scale(half);
    let rr = u1
        .checked_add(&u2)?
        .checked_sub(&lin(y.a1 + y.a2))?
        .scale(half);
    Ok((dd, rr))
}

/// Lowest x-power carrying a coefficient above `tol`, restricted to
/// y-degree at most `y_max`.
fn lowest_order(f: &MultiSeries, tol: f64, y_max: usize) -> usize {
    f.terms()
        .filter(|(i, c)| c.norm() > tol && i.y_degree() <= y_max)
        .map(|(i, _)| i.m)
        .min()
        .unwrap_or(usize::MAX)
}

/// Normal-form data `Y_norm = x^2 d/dx + y1(-lambda + a1 x + c1(v)) d/dy1 +
/// y2(lambda + a2 x + c2(v)) d/dy2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalFormData {
    pub lambda: C64,
    pub a1: C64,
    pub a2: C64,
    pub c1: UniSeries,
    pub c2: UniSeries,
    pub d_n: UniSeries,
    /// Largest `|1 / denominator|` met in the `tau0` and `sigma0` recursions.
    pub condition_number: f64,
    /// Stage tag and largest coefficient of the defect left by that stage.
    pub stage_remainders: Vec<(String, f64)>,
}

impl NormalFormData {
    /// The normal-form field at the given orders.
    pub fn field(&self, x_order: usize, y_order: usize) -> Result<PolyVectorField> {
        let mut f = PolyVectorField::model(x_order, y_order, self.lambda, self.a1, self.a2);
        let c1 = from_v_series(&self.c1, x_order, y_order).shift(0, 1, 0);
        let c2 = from_v_series(&self.c2, x_order, y_order).shift(0, 0, 1);
        f.comp_y1 = f.comp_y1.checked_add(&c1)?;
        f.comp_y2 = f.comp_y2.checked_add(&c2)?;
        Ok(f)
    }
}

/// Output of [`normalize_to_order`].
#[derive(Debug, Clone)]
pub struct OrderStage {
    pub data: NormalFormData,
    pub field: SaddleNodeField,
    pub map: ConjugacyMap,
    /// `d(v)` recorded after every step, for the stabilization check.
    pub d_history: Vec<UniSeries>,
}

/// Solve `(level - 1) s_j + a j s_j + 2 [m = 1] sum_l r_{j-l} l s_l = -rhs_j`.
fn resonant_ode(
    rhs: &UniSeries,
    r_res: Option<&UniSeries>,
    a: C64,
    level: usize,
    cond: &mut f64,
) -> Result<UniSeries> {
    let mut s = UniSeries::zero(rhs.order());
    for j in 1..rhs.order() {
        let mut acc = -rhs.get(j);
        if let Some(r) = r_res {
            for l in 1..j {
                acc -= r.get(j - l) * (2.0 * l as f64) * s.get(l);
            }
        }
        let den = C64::new((level - 1) as f64, 0.0)
            + a * j as f64
            + r_res.map_or(C64::default(), |r| r.get(0) * (2.0 * j as f64));
        if den.norm() < EPS_DENOMINATOR {
            return Err(Error::DegenerateResidue {
                order: level,
                degree: j,
                denominator: den.norm(),
            });
        }
        *cond = cond.max(1.0 / den.norm());
        s.set(j, acc / den);
    }
    Ok(s)
}

/// Solve `(lambda + d(v)) L_C(s) = -g` on the non-resonant part of `g`.
fn nonresonant_solve(g: &MultiSeries, unit: &MultiSeries) -> Result<MultiSeries> {
    let q = g.filter(|i| !i.is_resonant()).checked_mul(&recip(unit)?)?;
    Ok(q.map_terms(|i, c| (!i.is_resonant()).then(|| (*i, -c / (i.n2 as f64 - i.n1 as f64)))))
}

fn v_part(f: &MultiSeries, v_order: usize) -> UniSeries {
    crate::series::to_v_series(f, 0, v_order)
}

/// Normalize a prepared field `Y0 + D C + R R` up to order `n` in x: at
/// each pass the lowest deviating x-order is removed, by a radial flow when
/// `R` deviates there and by a tangential flow otherwise.
pub fn normalize_to_order(y: &SaddleNodeField, n: usize) -> Result<OrderStage> {
    let (k, dy) = y.orders();
    let v_order = dy / 2 + 1;
    let a = y.a1 + y.a2;
    let mut field = y.clone();
    let mut map = ConjugacyMap::identity(k, dy);
    map.provenance.clear();
    let mut cond: f64 = 0.0;
    let mut d_history = Vec::new();
    let max_steps = 4 * n + 8;
    let mut remainders = Vec::new();
    for _ in 0..max_steps {
        let scale = field.field.max_abs().max(1.0);
        let tol = 1e-12 * scale;
        let (dd, rr) = decompose(&field, tol)?;
        let d0 = dd.x_coefficient(0).with_orders(k, dy);
        let nonres0 = d0.filter(|i| !i.is_resonant()).max_abs();
        if nonres0 > 1e-8 * scale {
            return Err(Error::Invariant(format!(
                "restriction to x = 0 is not (lambda + d(v)) C (non-resonant part {nonres0:.3e})"
            )));
        }
        let d_v = v_part(&d0, v_order);
        d_history.push(d_v.clone());
        let dev_d = dd.filter(|i| i.m >= 1);
        let m_d = lowest_order(&dev_d, tol, dy);
        let m_r = lowest_order(&rr, tol, dy);
        let level = m_d.min(m_r);
        if level >= n {
            break;
        }
        let unit =
            from_v_series(&d_v, k, dy).checked_add(&MultiSeries::constant(k, dy, y.lambda))?;
        let (step, tag) = if m_r == level {
            let r_m = rr.x_coefficient(level).with_orders(k, dy);
            let r_res = v_part(&r_m, v_order);
            let first = level == 1;
            let tau0 = resonant_ode(&r_res, first.then_some(&r_res), a, level, &mut cond)?;
            let mut g = r_m.filter(|i| !i.is_resonant());
            if first {
                let vt = from_v_series(&tau0.deriv(), k, dy)
                    .shift(0, 1, 1)
                    .scale(C64::new(2.0, 0.0));
                g = g.checked_add(&g.checked_mul(&vt)?)?;
            }
            let tau1 = nonresonant_solve(&g, &unit)?;
            let tau = from_v_series(&tau0, k, dy)
                .shift(level - 1, 0, 0)
                .checked_add(&tau1.shift(level, 0, 0))?;
            (exp_flow_map(&tau, (1, 1))?, format!("radial-{level}"))
        } else {
            let d_m = dd.x_coefficient(level).with_orders(k, dy);
            let d_res = v_part(&d_m, v_order);
            let sigma0 = resonant_ode(&d_res, None, a, level, &mut cond)?;
            let sigma1 = nonresonant_solve(&d_m, &unit)?;
            let sigma = from_v_series(&sigma0, k, dy)
                .shift(level - 1, 0, 0)
                .checked_add(&sigma1.shift(level, 0, 0))?;
            (
                exp_flow_map(&sigma, (-1, 1))?,
                format!("tangential-{level}"),
            )
        };
        let step = ConjugacyMap::new(step.0, step.1, &tag)?;
        field = field.with_field(step.push_forward(&field.field)?);
        map = map.then(&step)?;
        remainders.push(tag);
    }
    let scale = field.field.max_abs().max(1.0);
    let (dd, rr) = decompose(&field, 1e-12 * scale)?;
    let defect = dd
        .filter(|i| i.m >= 1 && i.m < n)
        .max_abs()
        .max(rr.filter(|i| i.m < n).max_abs());
    let d_v = v_part(&dd.x_coefficient(0).with_orders(k, dy), v_order);
    let (u1, u2) = units(&field.field, 1e-12 * scale)?;
    let mut c1 = v_part(&u1.x_coefficient(0).with_orders(k, dy), v_order);
    let mut c2 = v_part(&u2.x_coefficient(0).with_orders(k, dy), v_order);
    c1.set(0, C64::default());
    c2.set(0, C64::default());
    let data = NormalFormData {
        lambda: y.lambda,
        a1: y.a1,
        a2: y.a2,
        c1,
        c2,
        d_n: d_v,
        condition_number: cond,
        stage_remainders: vec![(format!("order-{n} ({} steps)", remainders.len()), defect)],
    };
    Ok(OrderStage {
        data,
        field,
        map,
        d_history,
    })
}
