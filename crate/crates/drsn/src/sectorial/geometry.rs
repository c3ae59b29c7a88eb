//! Sectors, the stable domain and the parameters that shape them.
//!
//! Everything is measured in the rotated chart `X = x / lambda`, where the
//! sector of the `+` side is bisected by `i R+`. The `-` side is handled by
//! complex conjugation of `X`, which exchanges the two Cauchy problems of
//! the model field.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::field::SectorialField;

/// Which of the two sectorial problems, bisected by `i lambda` or `-i lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorSign {
    Plus,
    Minus,
}

impl SectorSign {
    /// `+1` or `-1`.
    pub fn factor(self) -> f64 {
        match self {
            SectorSign::Plus => 1.0,
            SectorSign::Minus => -1.0,
        }
    }
}

/// Optional overrides of the automatically chosen parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryOverrides {
    pub epsilon: Option<f64>,
    pub omega: Option<f64>,
    pub omega_prime: Option<f64>,
    pub mu: Option<f64>,
    pub delta: Option<f64>,
    pub delta_prime: Option<f64>,
    pub r: Option<f64>,
    pub r_y: Option<f64>,
}

/// Parameters of the sector `S(r, epsilon)`, the auxiliary sectors
/// `Sigma(1, r, omega)`, `Theta(r, mu)` and the stable domain `Omega`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorGeometry {
    pub sign: SectorSign,
    pub lambda: C64,
    /// Residue `a = a1 + a2`.
    pub a: C64,
    pub r: f64,
    pub r_prime: f64,
    /// Radius of the polydisc in `y`.
    pub r_y: f64,
    pub r_y_prime: f64,
    pub epsilon: f64,
    pub omega: f64,
    pub omega_prime: f64,
    pub mu: f64,
    pub delta: f64,
    pub delta_prime: f64,
}

/// Which regions a point lies in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Membership {
    pub in_sigma: bool,
    pub in_theta_plus: bool,
    pub in_theta_minus: bool,
    pub in_omega: bool,
}

/// Margin kept below `delta` and `delta'` when the radius is chosen from samples.
const RADIUS_MARGIN: f64 = 0.8;

impl SectorGeometry {
    /// Fill in every parameter not given in `overrides` from the admissible
    /// ranges, then validate.
    pub fn with_parameters(
        sign: SectorSign,
        lambda: C64,
        a: C64,
        r: f64,
        r_y: f64,
        overrides: &GeometryOverrides,
    ) -> Result<Self> {
        if a.re <= 0.0 || !a.re.is_finite() {
            return Err(Error::Geometry(format!(
                "Re(a) = {} must be positive",
                a.re
            )));
        }
        let cos_arg = a.re / a.norm();
        let omega_prime = overrides.omega_prime.unwrap_or(cos_arg / 2.0);
        let low = (omega_prime.clamp(-1.0, 1.0).acos() - a.arg().abs()).cos();
        let omega = overrides.omega.unwrap_or((low + 1.0) / 2.0);
        let mu = overrides
            .mu
            .unwrap_or((1.0 - omega * omega).max(0.0).sqrt() / 2.0);
        let delta = overrides.delta.unwrap_or(omega.min(mu) / 2.0);
        let delta_prime = overrides.delta_prime.unwrap_or(omega_prime / 2.0);
        let epsilon = overrides
            .epsilon
            .unwrap_or(mu.clamp(-1.0, 1.0).acos() / 2.0);
        let r = overrides.r.unwrap_or(r);
        let r_y = overrides.r_y.unwrap_or(r_y);
        let mut g = SectorGeometry {
            sign,
            lambda,
            a,
            r,
            r_prime: 0.0,
            r_y,
            r_y_prime: 0.0,
            epsilon,
            omega,
            omega_prime,
            mu,
            delta,
            delta_prime,
        };
        g.validate_parameters()?;
        g.set_radii(r, r_y);
        Ok(g)
    }

    /// Parameters for a field, with the radius halved until the sampled
    /// bounds `|1/(1 + bX + C) - 1| < delta` and
    /// `|(a/2 + R1)/(1 + bX + C) - a/2| < delta'` hold on `S(r, epsilon) x D(0, r)`.
    pub fn for_field(
        field: &SectorialField,
        sign: SectorSign,
        overrides: &GeometryOverrides,
    ) -> Result<Self> {
        let mut g = Self::with_parameters(sign, field.lambda(), field.a(), 0.5, 0.5, overrides)?;
        for _ in 0..60 {
            let (q1, q2) = g.sampled_bounds(field);
            if q1 < RADIUS_MARGIN * g.delta && q2 < RADIUS_MARGIN * g.delta_prime {
                return Ok(g);
            }
            if overrides.r.is_some() && overrides.r_y.is_some() {
                return Err(Error::Geometry(format!(
                    "field bounds {q1:.3e} / {q2:.3e} exceed delta = {:.3e} / delta' = {:.3e} at the given radii",
                    g.delta, g.delta_prime
                )));
            }
            let r = if overrides.r.is_some() {
                g.r
            } else {
                g.r / 2.0
            };
            let r_y = if overrides.r_y.is_some() {
                g.r_y
            } else {
                g.r_y / 2.0
            };
            g.set_radii(r, r_y);
        }
        Err(Error::Geometry("no admissible radius found".into()))
    }

    /// Same parameters at another x-radius.
    pub fn with_radius(&self, r: f64) -> Self {
        let mut g = self.clone();
        g.set_radii(r, self.r_y);
        g
    }

    fn set_radii(&mut self, r: f64, r_y: f64) {
        let span = self.epsilon + self.omega.asin();
        self.r = r;
        self.r_y = r_y;
        self.r_prime = r * (-self.kx() * span).exp();
        self.r_y_prime = r_y * (-self.ky() * span).exp();
    }

    /// Largest sampled values of the two quantities bounded by `delta` and `delta'`.
    pub fn sampled_bounds(&self, field: &SectorialField) -> (f64, f64) {
        let half_a = self.a / 2.0;
        let b = field.b();
        let mut q1: f64 = 0.0;
        let mut q2: f64 = 0.0;
        let one = C64::new(1.0, 0.0);
        for rf in [1.0, 0.5, 0.25] {
            for j in 0..=12 {
                let theta = -self.epsilon + (PI + 2.0 * self.epsilon) * (j as f64 + 0.5) / 13.0;
                let x = self.to_plus_frame(C64::from_polar(rf * self.r, theta));
                for k1 in 0..3 {
                    for k2 in 0..3 {
                        let y1 = C64::from_polar(self.r_y, 2.0 * PI * k1 as f64 / 3.0);
                        let y2 = C64::from_polar(self.r_y, 2.0 * PI * k2 as f64 / 3.0 + 0.4);
                        let v = field.values([x, y1, y2]);
                        let den = one + b * x + v.c;
                        q1 = q1.max((den.inv() - one).norm());
                        q2 = q2.max(((half_a + v.r / x) / den - half_a).norm());
                    }
                }
            }
        }
        (q1, q2)
    }

    /// Check every admissible-range inequality.
    pub fn validate(&self) -> Result<()> {
        self.validate_parameters()?;
        if !(self.r > 0.0 && self.r_y > 0.0) {
            return Err(Error::Geometry("radii must be positive".into()));
        }
        Ok(())
    }

    fn validate_parameters(&self) -> Result<()> {
        let a = self.a;
        let fail = |what: &str| Err(Error::Geometry(what.to_string()));
        let cos_arg = a.re / a.norm();
        if !(self.omega_prime > 0.0 && self.omega_prime < cos_arg) {
            return fail(&format!(
                "omega' = {} not in (0, Re(a)/|a| = {cos_arg})",
                self.omega_prime
            ));
        }
        let low = (self.omega_prime.acos() - a.arg().abs()).cos();
        if !(self.omega > low && self.omega < 1.0) {
            return fail(&format!("omega = {} not in ({low}, 1)", self.omega));
        }
        let top = (1.0 - self.omega * self.omega).sqrt();
        if !(self.mu > 0.0 && self.mu < top) {
            return fail(&format!("mu = {} not in (0, {top})", self.mu));
        }
        if !(self.delta > 0.0 && self.delta < self.omega.min(self.mu)) {
            return fail(&format!(
                "delta = {} not in (0, min(omega, mu))",
                self.delta
            ));
        }
        if !(self.delta_prime > 0.0 && self.delta_prime < self.omega_prime) {
            return fail(&format!("delta' = {} not in (0, omega')", self.delta_prime));
        }
        if !(self.epsilon > 0.0 && self.epsilon < FRAC_PI_2 && self.epsilon < self.mu.acos()) {
            return fail(&format!(
                "epsilon = {} not in (0, min(pi/2, arccos mu))",
                self.epsilon
            ));
        }
        Ok(())
    }

    /// `(1 + delta) / (mu - delta)`.
    pub fn kx(&self) -> f64 {
        (1.0 + self.delta) / (self.mu - self.delta)
    }

    /// `(|a/2| + delta') / (mu - delta)`.
    pub fn ky(&self) -> f64 {
        (self.a.norm() / 2.0 + self.delta_prime) / (self.mu - self.delta)
    }

    /// Direction of the bisector in the original x-plane.
    pub fn bisector(&self) -> f64 {
        (C64::new(0.0, self.sign.factor()) * self.lambda).arg()
    }

    /// Map a rotated `X` to the frame of the `+` problem and back (an involution).
    pub(crate) fn to_plus_frame(&self, x: C64) -> C64 {
        match self.sign {
            SectorSign::Plus => x,
            SectorSign::Minus => x.conj(),
        }
    }

    /// Membership of a point of the rotated chart.
    pub fn membership_rotated(&self, q: [C64; 3]) -> Membership {
        let w = self.to_plus_frame(q[0]);
        let n = w.norm();
        let in_disc = n < self.r && n > 0.0;
        let in_sigma = in_disc && w.im > self.omega * n;
        let in_theta_plus = in_disc && w.re > self.mu * n;
        let in_theta_minus = in_disc && w.re < -self.mu * n;
        let theta = arg_plus(w);
        let in_sector = in_disc && theta > -self.epsilon && theta < PI + self.epsilon;
        let (ny1, ny2) = (q[1].norm(), q[2].norm());
        let mut in_omega = in_sector && ny1 < self.r_y && ny2 < self.r_y;
        if in_omega && w.im < self.omega * n {
            let excess = if w.re > 0.0 {
                theta - self.omega.asin()
            } else {
                PI - self.omega.asin() - theta
            };
            let bx = self.r * (self.kx() * excess).exp();
            let by = self.r_y * (self.ky() * excess).exp();
            in_omega = n <= bx && ny1 <= by && ny2 <= by;
        }
        Membership {
            in_sigma,
            in_theta_plus,
            in_theta_minus,
            in_omega,
        }
    }
}

impl SectorGeometry {
    /// Bounds on `|X|` and `|y_j|` in `Omega` along the ray of argument
    /// `theta` (plus frame, `theta` in `(-epsilon, pi + epsilon)`).
    pub fn ray_bounds(&self, theta: f64) -> (f64, f64) {
        let edge = self.omega.asin();
        let excess = if theta.sin() >= self.omega {
            0.0
        } else if theta.cos() > 0.0 {
            theta - edge
        } else {
            PI - edge - theta
        };
        (
            self.r * (self.kx() * excess).exp(),
            self.r_y * (self.ky() * excess).exp(),
        )
    }

    /// Point of `Omega` (original chart) from six numbers in `[0, 1)`:
    /// the argument of `X` across the sector, the fractions of the allowed
    /// radii for `X`, `y1` and `y2`, and the phases of `y1` and `y2`.
    /// Fractions are clamped to `[0.001, 0.999]` so the point stays inside.
    pub fn omega_point(&self, u: [f64; 6]) -> [C64; 3] {
        let frac = |v: f64| v.clamp(0.001, 0.999);
        let theta = -self.epsilon + (PI + 2.0 * self.epsilon) * frac(u[0]);
        let w = C64::from_polar(1.0, theta);
        let (rx, ry) = self.ray_bounds(theta);
        let x = self.to_plus_frame(w * (rx * frac(u[1])));
        [
            x * self.lambda,
            C64::from_polar(ry * frac(u[2]), 2.0 * PI * u[4]),
            C64::from_polar(ry * frac(u[3]), 2.0 * PI * u[5]),
        ]
    }
}

/// Argument in `(-pi/2, 3pi/2]`, continuous across the whole `+` sector.
pub(crate) fn arg_plus(w: C64) -> f64 {
    let t = w.arg();
    if t <= -FRAC_PI_2 {
        t + 2.0 * PI
    } else {
        t
    }
}

/// Regions containing the point `(x, y1, y2)` of the original chart.
pub fn domain_membership(p: [C64; 3], geom: &SectorGeometry) -> Membership {
    geom.membership_rotated([p[0] / geom.lambda, p[1], p[2]])
}

/// Upper bound on the time a start in the `Theta` part of `Omega` needs to
/// enter `Sigma`: `exp(kx (epsilon + arcsin omega)) / ((1 + delta) |X0|)`.
pub fn critical_time_bound(x0: C64, geom: &SectorGeometry) -> f64 {
    let x = (x0 / geom.lambda).norm();
    (geom.kx() * (geom.epsilon + geom.omega.asin())).exp() / ((1.0 + geom.delta) * x)
}
