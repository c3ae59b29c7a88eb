//! The first Painlevé equation at infinity: weighted chart, transverse
//! Hamiltonian structure and symplecticity of normalizing maps.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::ConjugacyMap;
use crate::normalization::{normalize, Normalization};
use crate::saddle_node::{classify, diagonalize_constant_linear_part, Classification};
use crate::series::{ExactRegion, MultiIndex, MultiSeries, PolyVectorField, UniSeries};

/// Weights of `(t, z1, z2)` in fifths: `t = x^{-4/5}`, `z1 = y1 x^{-2/5}`,
/// `z2 = y2 x^{-3/5}`.
const WEIGHT_T: i64 = 4;
const WEIGHT_Z: [i64; 2] = [2, 3];

/// Default tolerance of the transverse-structure checks.
pub const IDEAL_TOLERANCE: f64 = 1e-8;

/// The translation `y1 <- y1 + zeta` of the chart, `zeta = i / sqrt(6)`.
pub fn zeta() -> C64 {
    C64::new(0.0, 1.0 / 6f64.sqrt())
}

/// Polynomial Hamiltonian `H(t, z1, z2) = sum h_{a,b,c} t^a z1^b z2^c`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Hamiltonian {
    terms: BTreeMap<(u32, u32, u32), C64>,
}

impl Hamiltonian {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, a: u32, b: u32, c: u32, coeff: C64) -> Self {
        *self.terms.entry((a, b, c)).or_default() += coeff;
        self
    }

    /// `H = 2 z1^3 + t z1 - z2^2 / 2`.
    pub fn painleve_one() -> Self {
        Self::new()
            .with_term(0, 3, 0, C64::new(2.0, 0.0))
            .with_term(1, 1, 0, C64::new(1.0, 0.0))
            .with_term(0, 0, 2, C64::new(-0.5, 0.0))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32, u32), &C64)> {
        self.terms.iter()
    }
}

/// Scalar factor relating the transformed field to `Y`: `Z~ = -(5 / (4 x^{1/5})) Y`.
pub const CHART_FACTOR: f64 = -4.0 / 5.0;

fn add_term(acc: &mut Vec<(MultiIndex, C64)>, fifths: i64, n1: u32, n2: u32, c: C64) -> Result<()> {
    if fifths < 0 || fifths % 5 != 0 {
        return Err(Error::Shape(format!(
            "monomial y1^{n1} y2^{n2} picks up x^({fifths}/5) in the chart"
        )));
    }
    acc.push((
        MultiIndex::new((fifths / 5) as usize, n1 as usize, n2 as usize),
        c,
    ));
    Ok(())
}

/// Expand `f(x, y1 + shift, y2)`.
fn translate_y1(f: &MultiSeries, shift: C64) -> MultiSeries {
    if shift == C64::default() {
        return f.clone();
    }
    let (k, d) = f.orders();
    let mut terms = Vec::new();
    for (i, c) in f.terms() {
        let mut binom = 1.0;
        for j in 0..=i.n1 {
            // y1^j shift^{n1 - j} C(n1, j)
            terms.push((
                MultiIndex::new(i.m, j, i.n2),
                c * shift.powu((i.n1 - j) as u32) * binom,
            ));
            binom = binom * (i.n1 - j) as f64 / (j + 1) as f64;
        }
    }
    let mut acc: BTreeMap<MultiIndex, C64> = BTreeMap::new();
    for (i, c) in terms {
        *acc.entry(i).or_default() += c;
    }
    MultiSeries::from_terms(k, d, acc)
}

/// Push the field `d/dt - H_{z2} d/dz1 + H_{z1} d/dz2` through the weighted
/// chart, multiply by `-(4/5) x^{1/5}` and translate `y1 <- y1 + shift`.
/// Fractional powers of x are rejected as a shape error.
pub fn boutroux_transform(
    h: &Hamiltonian,
    shift: C64,
    x_order: usize,
    y_order: usize,
) -> Result<PolyVectorField> {
    let scale = C64::new(CHART_FACTOR, 0.0);
    let mut t1 = Vec::new();
    let mut t2 = Vec::new();
    for (&(a, b, c), &coeff) in h.terms() {
        let base = -(WEIGHT_T * a as i64);
        if c > 0 {
            // dz1/dt = -dH/dz2, then y1 = z1 x^{2/5} and the x^{1/5} factor
            let fifths =
                base - WEIGHT_Z[0] * b as i64 - WEIGHT_Z[1] * (c as i64 - 1) + WEIGHT_Z[0] + 1;
            add_term(&mut t1, fifths, b, c - 1, -coeff * c as f64 * scale)?;
        }
        if b > 0 {
            let fifths =
                base - WEIGHT_Z[0] * (b as i64 - 1) - WEIGHT_Z[1] * c as i64 + WEIGHT_Z[1] + 1;
            add_term(&mut t2, fifths, b - 1, c, coeff * b as f64 * scale)?;
        }
    }
    // d/dt in the chart: dx/dt = -(5/4) x^{9/5}, so y_i = z_i x^{w_i/5} gains
    // (w_i / 5) y_i x^{-1} dx/dt, which the factor turns into (w_i / 5) x y_i
    t1.push((
        MultiIndex::new(1, 1, 0),
        C64::new(WEIGHT_Z[0] as f64 / 5.0, 0.0),
    ));
    t2.push((
        MultiIndex::new(1, 0, 1),
        C64::new(WEIGHT_Z[1] as f64 / 5.0, 0.0),
    ));
    let sum = |terms: Vec<(MultiIndex, C64)>| {
        let mut acc: BTreeMap<MultiIndex, C64> = BTreeMap::new();
        for (i, c) in terms {
            if i.m < x_order && i.y_degree() <= y_order {
                *acc.entry(i).or_default() += c;
            }
        }
        MultiSeries::from_terms(x_order, y_order, acc)
    };
    let f1 = translate_y1(&sum(t1), shift);
    let f2 = translate_y1(&sum(t2), shift);
    PolyVectorField::saddle_node(f1, f2)
}

/// The compactified Painlevé I field
/// `x^2 d/dx + (-4/5 y2 + 2/5 x y1 + 2 zeta/5 x) d/dy1 + (-24/5 y1^2 - 48 zeta/5 y1 + 3/5 x y2) d/dy2`.
pub fn p1_field(x_order: usize, y_order: usize) -> PolyVectorField {
    let z = zeta();
    let r = |v: f64| C64::new(v, 0.0);
    let t = |m, n1, n2, c| (MultiIndex::new(m, n1, n2), c);
    let f1 = MultiSeries::from_terms(
        x_order,
        y_order,
        [t(0, 0, 1, r(-0.8)), t(1, 1, 0, r(0.4)), t(1, 0, 0, z * 0.4)],
    );
    let f2 = MultiSeries::from_terms(
        x_order,
        y_order,
        [
            t(0, 2, 0, r(-4.8)),
            t(0, 1, 0, z * -9.6),
            t(1, 0, 1, r(0.6)),
        ],
    );
    PolyVectorField::saddle_node(f1, f2).expect("matching orders")
}

/// Outcome of [`check_transversally_hamiltonian`].
#[derive(Debug, Clone, Serialize)]
pub struct HamiltonianCheck {
    pub passed: bool,
    /// `L_Y(dx) = d(comp_x)` lies in the ideal generated by `dx`.
    pub dx_in_ideal: bool,
    /// Largest coefficient of `x` times the `dy1 ^ dy2` component of `L_Y(omega)`.
    pub max_defect: f64,
    /// Offending coefficients of that component, keyed by monomial.
    pub offending: Vec<(MultiIndex, C64)>,
    pub tolerance: f64,
}

/// For `omega = dy1 ^ dy2 / x`, the `dy1 ^ dy2` component of `L_Y(omega)`
/// is `(div_y Y - comp_x / x) / x`; it must vanish for `L_Y(omega)` to lie
/// in the ideal generated by `dx`.
pub fn check_transversally_hamiltonian(y: &PolyVectorField, tol: f64) -> Result<HamiltonianCheck> {
    let (k, d) = y.orders();
    let dx_in_ideal = y.comp_x.filter(|i| i.y_degree() > 0).is_zero();
    let div = y.comp_y1.deriv_y1().checked_add(&y.comp_y2.deriv_y2())?;
    // Y(1/x) = -comp_x / x^2
    let g = div.checked_sub(&y.comp_x.with_orders(k, d).div_x_pow(1)?)?;
    // derivatives lose the top y-degree
    let g = g.filter(|i| i.y_degree() < d);
    let offending: Vec<(MultiIndex, C64)> = g
        .terms()
        .filter(|(_, c)| c.norm() > tol)
        .map(|(i, c)| (*i, *c))
        .collect();
    let max_defect = g.max_abs();
    Ok(HamiltonianCheck {
        passed: dx_in_ideal && offending.is_empty(),
        dx_in_ideal,
        max_defect,
        offending,
        tolerance: tol,
    })
}

/// Outcome of the symplecticity checks.
#[derive(Debug, Clone, Serialize)]
pub struct SymplecticCheck {
    pub passed: bool,
    /// Largest `|det D_y Phi - 1|` coefficient (or sample value).
    pub max_defect: f64,
    pub tolerance: f64,
    /// Where the formal check was carried out; `None` for sample checks.
    pub region: Option<ExactRegion>,
}

/// Formal check: `det D_y Phi = 1` coefficientwise, where `region` is the
/// set on which the map's components are exact.
pub fn check_transversally_symplectic(
    map: &ConjugacyMap,
    region: &ExactRegion,
    tol: f64,
) -> Result<SymplecticCheck> {
    let (k, d) = map.orders();
    let det =
        map.y_jacobian_det()?
            .checked_sub(&MultiSeries::constant(k, d, C64::new(1.0, 0.0)))?;
    let region = region.after_y_derivative();
    let max_defect = det.max_abs_in(&region);
    Ok(SymplecticCheck {
        passed: max_defect <= tol,
        max_defect,
        tolerance: tol,
        region: Some(region),
    })
}

/// Pointwise check of `det D_y Phi = 1` at sample points, with the
/// Jacobian from central differences of step `h`.
pub fn check_symplectic_samples<F>(
    phi: F,
    points: &[(C64, C64, C64)],
    h: f64,
    tol: f64,
) -> SymplecticCheck
where
    F: Fn(C64, C64, C64) -> (C64, C64),
{
    let mut max_defect: f64 = 0.0;
    for &(x, y1, y2) in points {
        let dh = C64::new(h, 0.0);
        let (a_p, b_p) = phi(x, y1 + dh, y2);
        let (a_m, b_m) = phi(x, y1 - dh, y2);
        let (c_p, d_p) = phi(x, y1, y2 + dh);
        let (c_m, d_m) = phi(x, y1, y2 - dh);
        let j11 = (a_p - a_m) / (2.0 * h);
        let j21 = (b_p - b_m) / (2.0 * h);
        let j12 = (c_p - c_m) / (2.0 * h);
        let j22 = (d_p - d_m) / (2.0 * h);
        let det = j11 * j22 - j12 * j21;
        max_defect = max_defect.max((det - 1.0).norm());
    }
    SymplecticCheck {
        passed: max_defect <= tol,
        max_defect,
        tolerance: tol,
        region: None,
    }
}

/// Report of [`painleve_demo`].
#[derive(Debug, Clone, Serialize)]
pub struct PainleveReport {
    pub order: usize,
    pub x_order: usize,
    pub y_order: usize,
    pub lambda: C64,
    pub residue: C64,
    pub classification: Classification,
    pub a1: C64,
    pub a2: C64,
    pub c1: UniSeries,
    pub c2: UniSeries,
    /// `max |c1_k + c2_k|` over `k <= 3`.
    pub c_sum_max: f64,
    pub conjugacy_residual: f64,
    pub hamiltonian: HamiltonianCheck,
    pub symplectic: SymplecticCheck,
    pub provenance: Vec<String>,
}

/// Build, diagonalize and normalize the Painlevé I field.
pub fn normalize_p1(n: usize, x_order: usize, y_order: usize) -> Result<Normalization> {
    let (field, _) = diagonalize_constant_linear_part(&p1_field(x_order, y_order))?;
    normalize(&field, n, x_order, y_order)
}

/// Full Painlevé I run: transverse structure, classification, formal
/// normalization to order `n` and symplecticity of the normalizing map.
pub fn painleve_demo(n: usize, x_order: usize, y_order: usize) -> Result<PainleveReport> {
    let raw = p1_field(x_order, y_order);
    let hamiltonian = check_transversally_hamiltonian(&raw, IDEAL_TOLERANCE)?;
    let (field, diag) = diagonalize_constant_linear_part(&raw)?;
    let norm = normalize(&field, n, x_order, y_order)?;
    let c_sum = norm.data.c1.checked_add(&norm.data.c2)?;
    let c_sum_max = c_sum
        .coeffs()
        .iter()
        .take(4)
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let full = diag
        .with_orders(x_order, norm.working_y_order)
        .then(&norm.map)?;
    let region = ExactRegion::after_shift(x_order, norm.working_y_order, full.shift_valuation())
        .restrict(n, y_order + 1);
    let symplectic = check_transversally_symplectic(&full, &region, IDEAL_TOLERANCE)?;
    Ok(PainleveReport {
        order: n,
        x_order,
        y_order,
        lambda: field.lambda,
        residue: field.residue,
        classification: classify(&field),
        a1: norm.data.a1,
        a2: norm.data.a2,
        c1: norm.data.c1.clone(),
        c2: norm.data.c2.clone(),
        c_sum_max,
        conjugacy_residual: norm.residual_max()?,
        hamiltonian,
        symplectic,
        provenance: full.provenance.clone(),
    })
}
