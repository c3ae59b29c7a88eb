use num_complex::Complex64 as C64;

use super::dense::Dense;
use super::multi::MultiSeries;
use super::region::ExactRegion;
use crate::error::Result;

/// Polynomial vector field `comp_x d/dx + comp_y1 d/dy1 + comp_y2 d/dy2`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    pub comp_x: MultiSeries,
    pub comp_y1: MultiSeries,
    pub comp_y2: MultiSeries,
}

impl PolyVectorField {
    pub fn new(comp_x: MultiSeries, comp_y1: MultiSeries, comp_y2: MultiSeries) -> Result<Self> {
        let f = PolyVectorField {
            comp_x,
            comp_y1,
            comp_y2,
        };
        f.check_orders()?;
        Ok(f)
    }

    fn check_orders(&self) -> Result<()> {
        self.comp_x.checked_sub(&self.comp_y1)?;
        self.comp_x.checked_sub(&self.comp_y2)?;
        Ok(())
    }

    /// A saddle-node shaped field: `x^2 d/dx + f1 d/dy1 + f2 d/dy2`.
    pub fn saddle_node(comp_y1: MultiSeries, comp_y2: MultiSeries) -> Result<Self> {
        let (k, d) = comp_y1.orders();
        PolyVectorField::new(
            MultiSeries::monomial(k, d, 2, 0, 0, C64::new(1.0, 0.0)),
            comp_y1,
            comp_y2,
        )
    }

    pub fn orders(&self) -> (usize, usize) {
        self.comp_x.orders()
    }

    /// `-y1 d/dy1 + y2 d/dy2`.
    pub fn c_basis(x_order: usize, y_order: usize) -> Self {
        PolyVectorField {
            comp_x: MultiSeries::zero(x_order, y_order),
            comp_y1: MultiSeries::y1(x_order, y_order).neg(),
            comp_y2: MultiSeries::y2(x_order, y_order),
        }
    }

    /// `y1 d/dy1 + y2 d/dy2`.
    pub fn r_basis(x_order: usize, y_order: usize) -> Self {
        PolyVectorField {
            comp_x: MultiSeries::zero(x_order, y_order),
            comp_y1: MultiSeries::y1(x_order, y_order),
            comp_y2: MultiSeries::y2(x_order, y_order),
        }
    }

    /// `lambda C + x (x d/dx + a1 y1 d/dy1 + a2 y2 d/dy2)`.
    pub fn model(x_order: usize, y_order: usize, lambda: C64, a1: C64, a2: C64) -> Self {
        let y1 = MultiSeries::y1(x_order, y_order);
        let y2 = MultiSeries::y2(x_order, y_order);
        PolyVectorField {
            comp_x: MultiSeries::monomial(x_order, y_order, 2, 0, 0, C64::new(1.0, 0.0)),
            comp_y1: y1
                .scale(-lambda)
                .checked_add(&y1.shift(1, 0, 0).scale(a1))
                .expect("same orders"),
            comp_y2: y2
                .scale(lambda)
                .checked_add(&y2.shift(1, 0, 0).scale(a2))
                .expect("same orders"),
        }
    }

    pub fn with_orders(&self, x_order: usize, y_order: usize) -> Self {
        PolyVectorField {
            comp_x: self.comp_x.with_orders(x_order, y_order),
            comp_y1: self.comp_y1.with_orders(x_order, y_order),
            comp_y2: self.comp_y2.with_orders(x_order, y_order),
        }
    }

    pub fn checked_sub(&self, other: &PolyVectorField) -> Result<PolyVectorField> {
        Ok(PolyVectorField {
            comp_x: self.comp_x.checked_sub(&other.comp_x)?,
            comp_y1: self.comp_y1.checked_sub(&other.comp_y1)?,
            comp_y2: self.comp_y2.checked_sub(&other.comp_y2)?,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.comp_x
            .max_abs()
            .max(self.comp_y1.max_abs())
            .max(self.comp_y2.max_abs())
    }

    /// x-valuation of the y-constant parts of the components; controls
    /// which coefficients of a Lie derivative are exact.
    pub fn y_constant_valuation(&self) -> usize {
        [&self.comp_y1, &self.comp_y2]
            .iter()
            .map(|c| c.filter(|i| i.y_degree() == 0).x_valuation())
            .min()
            .unwrap_or(usize::MAX)
    }

    pub(crate) fn to_dense(&self) -> [Dense; 3] {
        [
            self.comp_x.to_dense(),
            self.comp_y1.to_dense(),
            self.comp_y2.to_dense(),
        ]
    }
}

/// `L_V(f) = comp_x f_x + comp_y1 f_y1 + comp_y2 f_y2`, truncated.
pub fn lie_derivative(v: &PolyVectorField, f: &MultiSeries) -> Result<MultiSeries> {
    v.comp_x.checked_sub(f)?;
    let [vx, v1, v2] = v.to_dense();
    let fd = f.to_dense();
    Ok(MultiSeries::from_dense(&lie_dense(&vx, &v1, &v2, &fd)))
}

/// Indices of `L_V(f)` unaffected by the dropped terms of `f`.
pub fn lie_derivative_cutoff(v: &PolyVectorField, f: &MultiSeries) -> ExactRegion {
    let (k, d) = f.orders();
    let vy = v.y_constant_valuation();
    // a d/dx component without x factor moves dropped x^K terms to x^(K-1)
    let mut region = ExactRegion::after_lie_derivative(k, d, vy);
    if !v.comp_x.filter(|i| i.m == 0).is_empty() {
        region = region.intersect(&ExactRegion::full(k.saturating_sub(1), d));
    }
    region
}

pub(crate) fn lie_dense(vx: &Dense, v1: &Dense, v2: &Dense, f: &Dense) -> Dense {
    let mut out = vx.mul(&f.deriv_x());
    out.add_assign(&v1.mul(&f.deriv_y(1)));
    out.add_assign(&v2.mul(&f.deriv_y(2)));
    out
}
