//! Fibered changes of coordinates `(x, y) -> (x, phi(x, y))`.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::series::dense::Dense;
use crate::series::{lie_derivative_cutoff, ExactRegion, MultiSeries, PolyVectorField};

/// A fibered map stored in the old-to-new direction: if `Y` is the field in
/// the old coordinates, `phi_* Y` is the field in the new ones.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyMap {
    pub comp_y1: MultiSeries,
    pub comp_y2: MultiSeries,
    inverse: Option<(MultiSeries, MultiSeries)>,
    pub is_tangent_to_identity: bool,
    pub provenance: Vec<String>,
}

/// Serializable summary of a map's provenance and size.
#[derive(Debug, Clone, Serialize)]
pub struct MapSummary {
    pub provenance: Vec<String>,
    pub tangent_to_identity: bool,
    pub terms: usize,
}

fn tangent_check(c1: &MultiSeries, c2: &MultiSeries) -> bool {
    let (k, d) = c1.orders();
    let low = |s: &MultiSeries| s.filter(|i| i.m + i.y_degree() < 2);
    let r1 = c1
        .checked_sub(&MultiSeries::y1(k, d))
        .map(|s| low(&s).is_zero());
    let r2 = c2
        .checked_sub(&MultiSeries::y2(k, d))
        .map(|s| low(&s).is_zero());
    matches!((r1, r2), (Ok(true), Ok(true)))
}

impl ConjugacyMap {
    pub fn identity(x_order: usize, y_order: usize) -> Self {
        let y1 = MultiSeries::y1(x_order, y_order);
        let y2 = MultiSeries::y2(x_order, y_order);
        ConjugacyMap {
            comp_y1: y1.clone(),
            comp_y2: y2.clone(),
            inverse: Some((y1, y2)),
            is_tangent_to_identity: true,
            provenance: Vec::new(),
        }
    }

    pub fn new(comp_y1: MultiSeries, comp_y2: MultiSeries, tag: &str) -> Result<Self> {
        comp_y1.checked_sub(&comp_y2)?;
        let is_tangent_to_identity = tangent_check(&comp_y1, &comp_y2);
        Ok(ConjugacyMap {
            comp_y1,
            comp_y2,
            inverse: None,
            is_tangent_to_identity,
            provenance: vec![tag.to_string()],
        })
    }

    /// Attach a known inverse.
    pub fn with_inverse(mut self, inv1: MultiSeries, inv2: MultiSeries) -> Self {
        self.inverse = Some((inv1, inv2));
        self
    }

    pub fn orders(&self) -> (usize, usize) {
        self.comp_y1.orders()
    }

    pub fn summary(&self) -> MapSummary {
        MapSummary {
            provenance: self.provenance.clone(),
            tangent_to_identity: self.is_tangent_to_identity,
            terms: self.comp_y1.len() + self.comp_y2.len(),
        }
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let (k, d) = self.orders();
        self.comp_y1.approx_eq(&MultiSeries::y1(k, d), tol)
            && self.comp_y2.approx_eq(&MultiSeries::y2(k, d), tol)
    }

    /// x-valuation of the y-constant part of the components.
    pub fn shift_valuation(&self) -> usize {
        [&self.comp_y1, &self.comp_y2]
            .iter()
            .map(|c| c.filter(|i| i.y_degree() == 0).x_valuation())
            .min()
            .unwrap_or(usize::MAX)
    }

    /// Apply the map to a series: `f(x, phi(x, y))`.
    pub fn pull(&self, f: &MultiSeries) -> Result<MultiSeries> {
        f.compose_fibered(&self.comp_y1, &self.comp_y2)
    }

    /// `next o self`, with provenance concatenated.
    pub fn then(&self, next: &ConjugacyMap) -> Result<ConjugacyMap> {
        let c1 = next.pull_from(&next.comp_y1, self)?;
        let c2 = next.pull_from(&next.comp_y2, self)?;
        let mut out = ConjugacyMap::new(c1, c2, "composite")?;
        out.provenance = self
            .provenance
            .iter()
            .chain(&next.provenance)
            .cloned()
            .collect();
        if let (Some((a1, a2)), Some((b1, b2))) = (&self.inverse, &next.inverse) {
            let i1 = a1.compose_fibered(b1, b2)?;
            let i2 = a2.compose_fibered(b1, b2)?;
            out.inverse = Some((i1, i2));
        }
        Ok(out)
    }

    fn pull_from(&self, f: &MultiSeries, inner: &ConjugacyMap) -> Result<MultiSeries> {
        f.compose_fibered(&inner.comp_y1, &inner.comp_y2)
    }

    /// The inverse map, explicit when known, otherwise by fixed point.
    pub fn inverse(&self) -> Result<ConjugacyMap> {
        let (i1, i2) = match &self.inverse {
            Some(inv) => inv.clone(),
            None => self.invert_fixed_point()?,
        };
        let mut out = ConjugacyMap::new(i1, i2, "inverse")?;
        out.inverse = Some((self.comp_y1.clone(), self.comp_y2.clone()));
        out.provenance = self
            .provenance
            .iter()
            .rev()
            .map(|t| format!("{t}^-1"))
            .collect();
        Ok(out)
    }

    /// Inverse components, computing them if needed.
    pub fn inverse_components(&self) -> Result<(MultiSeries, MultiSeries)> {
        match &self.inverse {
            Some(inv) => Ok(inv.clone()),
            None => self.invert_fixed_point(),
        }
    }

    /// Solve `phi(x, psi) = z` by `psi <- L0^{-1}(z - P(x, psi))` where
    /// `phi = L0 y + P` and `L0` is the constant linear part. Each sweep
    /// fixes one more weight level `m + n1 + n2`.
    fn invert_fixed_point(&self) -> Result<(MultiSeries, MultiSeries)> {
        let (k, d) = self.orders();
        let l = [
            [self.comp_y1.get(0, 1, 0), self.comp_y1.get(0, 0, 1)],
            [self.comp_y2.get(0, 1, 0), self.comp_y2.get(0, 0, 1)],
        ];
        let det = l[0][0] * l[1][1] - l[0][1] * l[1][0];
        if det.norm() < 1e-12 {
            return Err(Error::SingularOperator(
                "map has singular linear part".into(),
            ));
        }
        let li = [
            [l[1][1] / det, -l[0][1] / det],
            [-l[1][0] / det, l[0][0] / det],
        ];
        let y1 = MultiSeries::y1(k, d);
        let y2 = MultiSeries::y2(k, d);
        let lin1 = y1.scale(l[0][0]).checked_add(&y2.scale(l[0][1]))?;
        let lin2 = y1.scale(l[1][0]).checked_add(&y2.scale(l[1][1]))?;
        let p1 = self.comp_y1.checked_sub(&lin1)?.to_dense();
        let p2 = self.comp_y2.checked_sub(&lin2)?.to_dense();
        let z1 = y1.to_dense();
        let z2 = y2.to_dense();
        let apply_li = |a: &Dense, b: &Dense| -> (Dense, Dense) {
            let mut r1 = a.scaled(li[0][0]);
            r1.add_assign(&b.scaled(li[0][1]));
            let mut r2 = a.scaled(li[1][0]);
            r2.add_assign(&b.scaled(li[1][1]));
            (r1, r2)
        };
        let (mut s1, mut s2) = apply_li(&z1, &z2);
        let max_weight = k.saturating_sub(1) + d;
        for w in 1..=max_weight {
            let q1 = p1.compose(&s1, &s2, Some(w));
            let q2 = p2.compose(&s1, &s2, Some(w));
            let mut r1 = z1.clone();
            r1.sub_assign(&q1);
            let mut r2 = z2.clone();
            r2.sub_assign(&q2);
            let (n1, n2) = apply_li(&r1, &r2);
            s1 = n1;
            s2 = n2;
        }
        Ok((MultiSeries::from_dense(&s1), MultiSeries::from_dense(&s2)))
    }

    /// Push-forward `phi_* Y`: new components `L_Y(phi_i) o phi^{-1}`; the
    /// x-component is unchanged since the map is fibered.
    pub fn push_forward(&self, y: &PolyVectorField) -> Result<PolyVectorField> {
        let (inv1, inv2) = self.inverse_components()?;
        let [vx, v1, v2] = y.to_dense();
        let g1 = crate::series::field_lie_dense(&vx, &v1, &v2, &self.comp_y1.to_dense());
        let g2 = crate::series::field_lie_dense(&vx, &v1, &v2, &self.comp_y2.to_dense());
        let i1 = inv1.to_dense();
        let i2 = inv2.to_dense();
        let n1 = g1.compose(&i1, &i2, None);
        let n2 = g2.compose(&i1, &i2, None);
        Ok(PolyVectorField {
            comp_x: y.comp_x.clone(),
            comp_y1: MultiSeries::from_dense(&n1),
            comp_y2: MultiSeries::from_dense(&n2),
        })
    }

    /// Region where [`push_forward`](Self::push_forward) is exact.
    pub fn push_forward_cutoff(&self, y: &PolyVectorField) -> Result<ExactRegion> {
        let (inv1, inv2) = self.inverse_components()?;
        let (k, d) = self.orders();
        let lie = lie_derivative_cutoff(y, &self.comp_y1);
        let v = [&inv1, &inv2]
            .iter()
            .map(|c| c.filter(|i| i.y_degree() == 0).x_valuation())
            .min()
            .unwrap_or(usize::MAX);
        Ok(lie.intersect(&ExactRegion::after_shift(k, d, v)))
    }

    /// Determinant of the y-Jacobian, exact for y-degree `< D`.
    pub fn y_jacobian_det(&self) -> Result<MultiSeries> {
        let a = self.comp_y1.deriv_y1();
        let b = self.comp_y1.deriv_y2();
        let c = self.comp_y2.deriv_y1();
        let e = self.comp_y2.deriv_y2();
        a.checked_mul(&e)?.checked_sub(&b.checked_mul(&c)?)
    }

    /// Evaluate the map at a point.
    pub fn eval(&self, x: C64, y1: C64, y2: C64) -> (C64, C64) {
        (self.comp_y1.eval(x, y1, y2), self.comp_y2.eval(x, y1, y2))
    }

    pub fn with_orders(&self, x_order: usize, y_order: usize) -> ConjugacyMap {
        ConjugacyMap {
            comp_y1: self.comp_y1.with_orders(x_order, y_order),
            comp_y2: self.comp_y2.with_orders(x_order, y_order),
            inverse: self.inverse.as_ref().map(|(a, b)| {
                (
                    a.with_orders(x_order, y_order),
                    b.with_orders(x_order, y_order),
                )
            }),
            is_tangent_to_identity: self.is_tangent_to_identity,
            provenance: self.provenance.clone(),
        }
    }
}
