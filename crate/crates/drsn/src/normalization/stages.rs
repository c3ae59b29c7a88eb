//! Preparation stages: center manifold, {x = 0} linearization, diagonal
//! linear part, constant linear coefficients, straightened hypersurfaces.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::borel::solve_irregular_ode;
use crate::error::{Error, Result};
use crate::maps::ConjugacyMap;
use crate::saddle_node::{
    c_basis_unit, orbital_linearize_x0, poincare_dulac_x0, restrict_field, SaddleNodeField,
    EPS_OBSTRUCTION,
};
use crate::series::{exp_flow_map, MultiIndex, MultiSeries, PolyVectorField, UniSeries};

const SIGMA: [f64; 2] = [-1.0, 1.0];

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// `f(x, u1(x), u2(x))` for series `u_i` vanishing at 0.
pub(crate) fn eval_on_curve(f: &MultiSeries, u1: &UniSeries, u2: &UniSeries) -> Result<UniSeries> {
    let k = f.x_order();
    let d = f.y_order();
    let mut p1 = vec![UniSeries::constant(k, one())];
    let mut p2 = vec![UniSeries::constant(k, one())];
    for _ in 0..d {
        p1.push(p1.last().expect("nonempty").checked_mul(u1)?);
        p2.push(p2.last().expect("nonempty").checked_mul(u2)?);
    }
    let mut out = UniSeries::zero(k);
    for (i, c) in f.terms() {
        let mono = p1[i.n1].checked_mul(&p2[i.n2])?.shift_up(i.m).scale(*c);
        out = out.checked_add(&mono)?;
    }
    Ok(out)
}

/// Output of [`center_manifold`].
#[derive(Debug, Clone)]
pub struct CenterManifold {
    pub y_hat: (UniSeries, UniSeries),
    pub field: SaddleNodeField,
    pub map: ConjugacyMap,
}

/// Formal invariant curve `y = y_hat(x)` with `y_hat(0) = 0`, from
/// `sigma_i lambda y_hat_{i,m} = (m - 1) y_hat_{i,m-1} - [f~_i(x, y_hat)]_m`,
/// and the translation `y -> y - y_hat(x)`.
pub fn center_manifold(y: &SaddleNodeField) -> Result<CenterManifold> {
    let (k, d) = y.orders();
    let lambda = y.lambda;
    let rest = [
        y.field
            .comp_y1
            .checked_sub(&MultiSeries::y1(k, d).scale(-lambda))?,
        y.field
            .comp_y2
            .checked_sub(&MultiSeries::y2(k, d).scale(lambda))?,
    ];
    let mut u = [UniSeries::zero(k), UniSeries::zero(k)];
    for m in 1..k {
        let vals = [
            eval_on_curve(&rest[0], &u[0], &u[1])?,
            eval_on_curve(&rest[1], &u[0], &u[1])?,
        ];
        for i in 0..2 {
            let c = (u[i].get(m - 1) * (m - 1) as f64 - vals[i].get(m)) / (lambda * SIGMA[i]);
            u[i].set(m, c);
        }
    }
    let [u1, u2] = u;
    let s1 = MultiSeries::from_uni(&u1, d, 0, 0);
    let s2 = MultiSeries::from_uni(&u2, d, 0, 0);
    let y1 = MultiSeries::y1(k, d);
    let y2 = MultiSeries::y2(k, d);
    let map = ConjugacyMap::new(
        y1.checked_sub(&s1)?,
        y2.checked_sub(&s2)?,
        "center-manifold",
    )?
    .with_inverse(y1.checked_add(&s1)?, y2.checked_add(&s2)?);
    let field = y.with_field(map.push_forward(&y.field)?);
    Ok(CenterManifold {
        y_hat: (u1, u2),
        field,
        map,
    })
}

/// Output of [`linearize_x0`].
#[derive(Debug, Clone)]
pub struct X0Linearization {
    pub d: UniSeries,
    pub field: SaddleNodeField,
    pub map: ConjugacyMap,
    pub method: X0Method,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum X0Method {
    /// Restriction already `(lambda + h(y)) C`: orbital linearization.
    Orbital,
    /// Poincaré–Dulac reduction of the restriction first.
    PoincareDulac,
}

/// Bring the restriction to `{x = 0}` to `(lambda + d(v)) C` by an
/// x-independent change of coordinates. `gamma_res` selects the resonant
/// part of the orbital linearization's flow time.
pub fn linearize_x0(y: &SaddleNodeField, gamma_res: Option<&UniSeries>) -> Result<X0Linearization> {
    let (k, dy) = y.orders();
    let (f1, f2) = restrict_field(&y.field);
    if c_basis_unit(&f1, &f2).is_ok() {
        let lin = orbital_linearize_x0(&f1, &f2, gamma_res)?;
        let gamma = lin.gamma.with_orders(k, dy);
        let (c1, c2) = exp_flow_map(&gamma, (1, -1))?;
        let map = ConjugacyMap::new(c1, c2, "x0-linearization")?;
        let field = y.with_field(map.push_forward(&y.field)?);
        return Ok(X0Linearization {
            d: lin.d,
            field,
            map,
            method: X0Method::Orbital,
        });
    }
    let (pd, a, b) = poincare_dulac_x0(&f1, &f2, y.lambda)?;
    let gap = a.checked_add(&b)?.max_abs();
    if gap > EPS_OBSTRUCTION {
        return Err(Error::NotDivIntegrable {
            degree: 0,
            obstruction: gap,
        });
    }
    let map = ConjugacyMap::new(
        pd.comp_y1.with_orders(k, dy),
        pd.comp_y2.with_orders(k, dy),
        "x0-linearization",
    )?;
    let field = y.with_field(map.push_forward(&y.field)?);
    Ok(X0Linearization {
        d: b,
        field,
        map,
        method: X0Method::PoincareDulac,
    })
}

/// Linear coefficient series `[[a11, a12], [a21, a22]]` in `x`.
fn linear_coefficients(field: &PolyVectorField) -> [[UniSeries; 2]; 2] {
    [
        [
            field.comp_y1.y_coefficient(1, 0),
            field.comp_y1.y_coefficient(0, 1),
        ],
        [
            field.comp_y2.y_coefficient(1, 0),
            field.comp_y2.y_coefficient(0, 1),
        ],
    ]
}

/// Output of [`diagonalize_linear_terms`].
#[derive(Debug, Clone)]
pub struct RiccatiStage {
    pub p1: UniSeries,
    pub p2: UniSeries,
    /// Diagonal linear coefficients `-lambda + x a^_1(x)`, `lambda + x a^_2(x)`.
    pub a_hat: (UniSeries, UniSeries),
    pub field: SaddleNodeField,
    pub map: ConjugacyMap,
}

/// Remove the off-diagonal linear terms `x c1(x) y2`, `x c2(x) y1` by
/// `y_old = [[1, x p2], [x p1, 1]] y_new`, with `p1`, `p2` the formal
/// solutions of the two Riccati equations.
pub fn diagonalize_linear_terms(y: &SaddleNodeField) -> Result<RiccatiStage> {
    let (k, d) = y.orders();
    let lambda = y.lambda;
    let lc = linear_coefficients(&y.field);
    let tol = 1e-9 * (1.0 + lambda.norm());
    let b1 = lc[0][0]
        .checked_add(&UniSeries::constant(k, lambda))?
        .shift_down(1, tol)?;
    let b2 = lc[1][1]
        .checked_sub(&UniSeries::constant(k, lambda))?
        .shift_down(1, tol)?;
    let c1 = lc[0][1].shift_down(1, tol)?;
    let c2 = lc[1][0].shift_down(1, tol)?;
    let x = UniSeries::from_real(k, &[0.0, 1.0]);
    let x2 = x.shift_up(1);
    let ones = UniSeries::constant(k, one());
    let e1 = x.checked_mul(&b2.checked_sub(&ones)?.checked_sub(&b1)?)?;
    let e2 = x.checked_mul(&b1.checked_sub(&ones)?.checked_sub(&b2)?)?;
    let q1 = x2.checked_mul(&c1)?;
    let q2 = x2.checked_mul(&c2)?;
    let mut p1 = UniSeries::zero(k);
    let mut p2 = UniSeries::zero(k);
    for n in 0..k {
        let rest1 = e1.checked_mul(&p1)?.get(n) - q1.checked_mul(&p1.checked_mul(&p1)?)?.get(n);
        let rest2 = e2.checked_mul(&p2)?.get(n) - q2.checked_mul(&p2.checked_mul(&p2)?)?.get(n);
        let prev1 = if n > 0 {
            p1.get(n - 1) * (n - 1) as f64
        } else {
            C64::default()
        };
        let prev2 = if n > 0 {
            p2.get(n - 1) * (n - 1) as f64
        } else {
            C64::default()
        };
        p1.set(n, (prev1 - c2.get(n) - rest1) / (lambda * 2.0));
        p2.set(n, (c1.get(n) + rest2 - prev2) / (lambda * 2.0));
    }
    let xp1 = x.checked_mul(&p1)?;
    let xp2 = x.checked_mul(&p2)?;
    let y1 = MultiSeries::y1(k, d);
    let y2 = MultiSeries::y2(k, d);
    let inv_det = ones.checked_sub(&xp1.checked_mul(&xp2)?)?.recip()?;
    let comp1 = y1.checked_sub(&y2.mul_uni(&xp2))?.mul_uni(&inv_det);
    let comp2 = y2.checked_sub(&y1.mul_uni(&xp1))?.mul_uni(&inv_det);
    let inv1 = y1.checked_add(&y2.mul_uni(&xp2))?;
    let inv2 = y2.checked_add(&y1.mul_uni(&xp1))?;
    let map = ConjugacyMap::new(comp1, comp2, "riccati")?.with_inverse(inv1, inv2);
    let field = y.with_field(map.push_forward(&y.field)?);
    let lc = linear_coefficients(&field.field);
    let a1 = lc[0][0]
        .checked_add(&UniSeries::constant(k, lambda))?
        .shift_down(1, tol)?;
    let a2 = lc[1][1]
        .checked_sub(&UniSeries::constant(k, lambda))?
        .shift_down(1, tol)?;
    Ok(RiccatiStage {
        p1,
        p2,
        a_hat: (a1, a2),
        field,
        map,
    })
}

/// Output of [`scalar_gauge`].
#[derive(Debug, Clone)]
pub struct GaugeStage {
    pub q1: UniSeries,
    pub q2: UniSeries,
    pub field: SaddleNodeField,
    pub map: ConjugacyMap,
}

/// `y_j -> y_j / q_j(x)` with `q_j = exp(int_0^x (a^_j(s) - a_j) / s ds)`,
/// leaving linear coefficients `-lambda + a1 x`, `lambda + a2 x`.
pub fn scalar_gauge(y: &SaddleNodeField, a_hat: &(UniSeries, UniSeries)) -> Result<GaugeStage> {
    let (k, d) = y.orders();
    let q = |a: &UniSeries| -> Result<UniSeries> {
        let a0 = UniSeries::constant(k, a.get(0));
        a.checked_sub(&a0)?
            .shift_down(1, f64::INFINITY)?
            .antideriv()
            .exp()
    };
    let q1 = q(&a_hat.0)?;
    let q2 = q(&a_hat.1)?;
    let y1 = MultiSeries::y1(k, d);
    let y2 = MultiSeries::y2(k, d);
    let map = ConjugacyMap::new(
        y1.mul_uni(&q1.recip()?),
        y2.mul_uni(&q2.recip()?),
        "scalar-gauge",
    )?
    .with_inverse(y1.mul_uni(&q1), y2.mul_uni(&q2));
    let mut field = y.with_field(map.push_forward(&y.field)?);
    field.a1 = a_hat.0.get(0);
    field.a2 = a_hat.1.get(0);
    field.residue = field.a1 + field.a2;
    Ok(GaugeStage { q1, q2, field, map })
}

/// Data of the hypersurface straightening.
#[derive(Debug, Clone)]
pub struct StraighteningState {
    pub psi1: MultiSeries,
    pub psi2: MultiSeries,
    pub t1: MultiSeries,
    pub t2: MultiSeries,
    /// `delta_{j,n}(x)` for the solved pure indices, keyed by `(j, n)`.
    pub delta_table: BTreeMap<(usize, MultiIndex), UniSeries>,
    /// Right-hand sides `zeta_{j,n}(x)` of the solved ODEs.
    pub zeta_cache: BTreeMap<(usize, MultiIndex), UniSeries>,
}

/// Output of [`straighten_hypersurfaces`].
#[derive(Debug, Clone)]
pub struct StraightenStage {
    pub state: StraighteningState,
    pub field: SaddleNodeField,
    pub map: ConjugacyMap,
}

/// Conjugate to `Y0 + T1 d/dy1 + T2 d/dy2` with `T_j` divisible by `y1 y2`,
/// through `y_old = y + psi(x, y)` where `psi` only has pure monomials.
pub fn straighten_hypersurfaces(y: &SaddleNodeField) -> Result<StraightenStage> {
    let (k, dy) = y.orders();
    let lambda = y.lambda;
    let a = [y.a1, y.a2];
    let y0 = PolyVectorField::model(k, dy, lambda, y.a1, y.a2);
    let big_f = [
        y.field.comp_y1.checked_sub(&y0.comp_y1)?,
        y.field.comp_y2.checked_sub(&y0.comp_y2)?,
    ];
    let id = [MultiSeries::y1(k, dy), MultiSeries::y2(k, dy)];
    let mut psi = [MultiSeries::zero(k, dy), MultiSeries::zero(k, dy)];
    let mut t = [MultiSeries::zero(k, dy), MultiSeries::zero(k, dy)];
    let mut delta_table = BTreeMap::new();
    let mut zeta_cache = BTreeMap::new();
    for deg in 2..=dy {
        let g1 = id[0].checked_add(&psi[0])?;
        let g2 = id[1].checked_add(&psi[1])?;
        let mut zeta = Vec::with_capacity(2);
        for j in 0..2 {
            let mut z = big_f[j].compose_fibered(&g1, &g2)?.y_homogeneous(deg);
            let dpsi = [psi[j].deriv_y1(), psi[j].deriv_y2()];
            for i in 0..2 {
                z = z.checked_sub(&t[i].checked_mul(&dpsi[i])?.y_homogeneous(deg))?;
            }
            zeta.push(z);
        }
        for j in 0..2 {
            for n1 in 0..=deg {
                let n2 = deg - n1;
                let rhs = zeta[j].y_coefficient(n1, n2);
                if rhs.is_zero(0.0) {
                    continue;
                }
                if n1 >= 1 && n2 >= 1 {
                    t[j] = t[j].checked_add(&MultiSeries::from_uni(&rhs, dy, n1, n2))?;
                    continue;
                }
                let d0 = lambda * (n2 as f64 - n1 as f64 - SIGMA[j]);
                let d1 = a[0] * n1 as f64 + a[1] * n2 as f64 - a[j];
                if d0.norm() < 1e-12 {
                    return Err(Error::Invariant(format!(
                        "vanishing delta for pure index ({n1}, {n2})"
                    )));
                }
                let sol = solve_irregular_ode(&rhs, d0, d1 / d0)?;
                psi[j] = psi[j].checked_add(&MultiSeries::from_uni(&sol, dy, n1, n2))?;
                let idx = MultiIndex::new(0, n1, n2);
                delta_table.insert((j + 1, idx), UniSeries::from_coeffs(k, &[d0, d1]));
                zeta_cache.insert((j + 1, idx), rhs);
            }
        }
    }
    let [psi1, psi2] = psi;
    let [t1, t2] = t;
    let inv1 = id[0].checked_add(&psi1)?;
    let inv2 = id[1].checked_add(&psi2)?;
    let (c1, c2) =
        ConjugacyMap::new(inv1.clone(), inv2.clone(), "straighten")?.inverse_components()?;
    let map = ConjugacyMap::new(c1, c2, "straighten")?.with_inverse(inv1, inv2);
    let field = y.with_field(PolyVectorField {
        comp_x: y0.comp_x.clone(),
        comp_y1: y0.comp_y1.checked_add(&t1)?,
        comp_y2: y0.comp_y2.checked_add(&t2)?,
    });
    Ok(StraightenStage {
        state: StraighteningState {
            psi1,
            psi2,
            t1,
            t2,
            delta_table,
            zeta_cache,
        },
        field,
        map,
    })
}
