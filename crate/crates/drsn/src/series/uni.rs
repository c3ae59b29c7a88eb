use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Truncated series in one variable, keeping powers `< order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniSeries {
    coeffs: Vec<C64>,
    order: usize,
}

impl UniSeries {
    pub fn zero(order: usize) -> Self {
        UniSeries {
            coeffs: vec![C64::default(); order],
            order,
        }
    }

    pub fn from_coeffs(order: usize, coeffs: &[C64]) -> Self {
        let mut u = UniSeries::zero(order);
        for (k, c) in coeffs.iter().enumerate().take(order) {
            u.coeffs[k] = *c;
        }
        u
    }

    pub fn from_real(order: usize, coeffs: &[f64]) -> Self {
        let c: Vec<C64> = coeffs.iter().map(|r| C64::new(*r, 0.0)).collect();
        UniSeries::from_coeffs(order, &c)
    }

    pub fn constant(order: usize, c: C64) -> Self {
        UniSeries::from_coeffs(order, &[c])
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn get(&self, k: usize) -> C64 {
        self.coeffs.get(k).copied().unwrap_or_default()
    }

    pub fn set(&mut self, k: usize, c: C64) {
        if k < self.order {
            self.coeffs[k] = c;
        }
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.norm() <= tol)
    }

    fn check(&self, other: &UniSeries) -> Result<()> {
        if self.order != other.order {
            return Err(Error::OrderMismatch(self.order, 0, other.order, 0));
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &UniSeries) -> Result<UniSeries> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        Ok(UniSeries {
            coeffs,
            order: self.order,
        })
    }

    pub fn checked_sub(&self, other: &UniSeries) -> Result<UniSeries> {
        self.check(other)?;
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a - b)
            .collect();
        Ok(UniSeries {
            coeffs,
            order: self.order,
        })
    }

    pub fn checked_mul(&self, other: &UniSeries) -> Result<UniSeries> {
        self.check(other)?;
        let mut out = UniSeries::zero(self.order);
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == C64::default() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate().take(self.order - i) {
                out.coeffs[i + j] += a * b;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: C64) -> UniSeries {
        UniSeries {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
            order: self.order,
        }
    }

    pub fn deriv(&self) -> UniSeries {
        let mut out = UniSeries::zero(self.order);
        for k in 1..self.order {
            out.coeffs[k - 1] = self.coeffs[k] * k as f64;
        }
        out
    }

    /// Antiderivative vanishing at 0, truncated.
    pub fn antideriv(&self) -> UniSeries {
        let mut out = UniSeries::zero(self.order);
        for k in 0..self.order.saturating_sub(1) {
            out.coeffs[k + 1] = self.coeffs[k] / (k + 1) as f64;
        }
        out
    }

    /// Multiply by `t^s`, truncating.
    pub fn shift_up(&self, s: usize) -> UniSeries {
        let mut out = UniSeries::zero(self.order);
        for k in 0..self.order.saturating_sub(s) {
            out.coeffs[k + s] = self.coeffs[k];
        }
        out
    }

    /// Exact division by `t^s`; fails when a lower coefficient exceeds `tol`.
    pub fn shift_down(&self, s: usize, tol: f64) -> Result<UniSeries> {
        if let Some((k, c)) = self
            .coeffs
            .iter()
            .enumerate()
            .take(s)
            .find(|(_, c)| c.norm() > tol)
        {
            return Err(Error::Shape(format!(
                "coefficient {k} = {c} prevents division by t^{s}"
            )));
        }
        let mut out = UniSeries::zero(self.order);
        for k in s..self.order {
            out.coeffs[k - s] = self.coeffs[k];
        }
        Ok(out)
    }

    /// `exp(u)` for `u(0) = 0`, via `E' = u' E`.
    pub fn exp(&self) -> Result<UniSeries> {
        if self.get(0).norm() > 0.0 {
            return Err(Error::FlowTime(format!("constant term {}", self.get(0))));
        }
        let du = self.deriv();
        let mut out = UniSeries::zero(self.order);
        if self.order == 0 {
            return Ok(out);
        }
        out.coeffs[0] = C64::new(1.0, 0.0);
        for n in 1..self.order {
            let mut acc = C64::default();
            for j in 0..n {
                acc += du.coeffs[j] * out.coeffs[n - 1 - j];
            }
            out.coeffs[n] = acc / n as f64;
        }
        Ok(out)
    }

    /// Reciprocal for `u(0) != 0`.
    pub fn recip(&self) -> Result<UniSeries> {
        let c0 = self.get(0);
        if c0.norm() == 0.0 {
            return Err(Error::SingularOperator(
                "reciprocal of a series with zero constant term".into(),
            ));
        }
        let mut out = UniSeries::zero(self.order);
        for n in 0..self.order {
            let mut acc = if n == 0 {
                C64::new(1.0, 0.0)
            } else {
                C64::default()
            };
            for j in 1..=n {
                acc -= self.coeffs[j] * out.coeffs[n - j];
            }
            out.coeffs[n] = acc / c0;
        }
        Ok(out)
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn eval(&self, t: C64) -> C64 {
        self.coeffs
            .iter()
            .rev()
            .fold(C64::default(), |acc, c| acc * t + c)
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn with_order(&self, order: usize) -> UniSeries {
        UniSeries::from_coeffs(order, &self.coeffs)
    }
}
