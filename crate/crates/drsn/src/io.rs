//! Text formats: series and field JSON, univariate coefficient lists and
//! inline complex numbers.
//!
//! A series is written as
//! `{"x_order": K, "y_order": D, "terms": [{"m", "n1", "n2", "re", "im"}, ...]}`
//! with terms sorted by `(m, n1, n2)`. A field is
//! `{"lambda": {"re", "im"}, "components": {"comp_y1": series, "comp_y2": series}}`
//! where `lambda` is optional and the x-component is `x^2`.

use std::collections::BTreeSet;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::ConjugacyMap;
use crate::saddle_node::{diagonalize_constant_linear_part, SaddleNodeField, EPS_RES};
use crate::series::{MultiIndex, MultiSeries, PolyVectorField, UniSeries};

/// One coefficient of a series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermRecord {
    pub m: usize,
    pub n1: usize,
    pub n2: usize,
    pub re: f64,
    pub im: f64,
}

/// Serialized form of a [`MultiSeries`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesRecord {
    pub x_order: usize,
    pub y_order: usize,
    pub terms: Vec<TermRecord>,
}

/// A complex number as `{"re", "im"}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRecord {
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentsRecord {
    pub comp_y1: SeriesRecord,
    pub comp_y2: SeriesRecord,
}

/// Serialized form of a saddle-node field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<ComplexRecord>,
    pub components: ComponentsRecord,
}

/// Serialized form of a [`UniSeries`]: coefficients of `x^0, x^1, ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UniSeriesRecord {
    pub coeffs: Vec<ComplexRecord>,
}

/// A field read from JSON, brought to diagonal form.
#[derive(Debug, Clone)]
pub struct LoadedField {
    pub field: SaddleNodeField,
    /// Linear change of coordinates from the file's coordinates to the diagonal ones.
    pub diagonalizing: ConjugacyMap,
}

impl From<C64> for ComplexRecord {
    fn from(z: C64) -> Self {
        ComplexRecord { re: z.re, im: z.im }
    }
}

impl ComplexRecord {
    fn value(self, what: &str) -> Result<C64> {
        if self.re.is_finite() && self.im.is_finite() {
            Ok(C64::new(self.re, self.im))
        } else {
            Err(Error::Parse(format!(
                "{what}: non-finite value ({}, {})",
                self.re, self.im
            )))
        }
    }
}

impl From<&MultiSeries> for SeriesRecord {
    fn from(s: &MultiSeries) -> Self {
        SeriesRecord {
            x_order: s.x_order(),
            y_order: s.y_order(),
            terms: s
                .terms()
                .map(|(i, c)| TermRecord {
                    m: i.m,
                    n1: i.n1,
                    n2: i.n2,
                    re: c.re,
                    im: c.im,
                })
                .collect(),
        }
    }
}

impl SeriesRecord {
    /// Validate and build the series: terms must fit the truncation, be
    /// finite, unique and sorted.
    pub fn to_series(&self) -> Result<MultiSeries> {
        let mut seen = BTreeSet::new();
        let mut previous: Option<MultiIndex> = None;
        let mut terms = Vec::with_capacity(self.terms.len());
        for (k, t) in self.terms.iter().enumerate() {
            let idx = MultiIndex::new(t.m, t.n1, t.n2);
            let c = ComplexRecord { re: t.re, im: t.im }.value(&format!("term {k}"))?;
            if t.m >= self.x_order || t.n1.saturating_add(t.n2) > self.y_order {
                return Err(Error::Parse(format!(
                    "term {k} ({}, {}, {}) outside the truncation (x_order {}, y_order {})",
                    t.m, t.n1, t.n2, self.x_order, self.y_order
                )));
            }
            if !seen.insert(idx) {
                return Err(Error::Parse(format!(
                    "term {k} ({}, {}, {}) is repeated",
                    t.m, t.n1, t.n2
                )));
            }
            if previous.is_some_and(|p| p > idx) {
                return Err(Error::Parse(format!(
                    "term {k} ({}, {}, {}) is out of order",
                    t.m, t.n1, t.n2
                )));
            }
            previous = Some(idx);
            terms.push((idx, c));
        }
        Ok(MultiSeries::from_terms(self.x_order, self.y_order, terms))
    }
}

fn json_error(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

/// Parse a series file.
pub fn parse_series(text: &str) -> Result<MultiSeries> {
    let rec: SeriesRecord = serde_json::from_str(text).map_err(|e| json_error("series", e))?;
    rec.to_series()
}

/// Render a series in the file format.
pub fn series_to_json(s: &MultiSeries) -> String {
    to_json(&SeriesRecord::from(s))
}

/// Parse a field file into its three components and the declared `lambda`.
pub fn parse_field_components(text: &str) -> Result<(PolyVectorField, Option<C64>)> {
    let rec: FieldRecord = serde_json::from_str(text).map_err(|e| json_error("field", e))?;
    let c1 = rec.components.comp_y1.to_series()?;
    let c2 = rec.components.comp_y2.to_series()?;
    if c1.orders() != c2.orders() {
        return Err(Error::Shape(format!(
            "components have truncations {:?} and {:?}",
            c1.orders(),
            c2.orders()
        )));
    }
    if c1.x_order() < 3 {
        return Err(Error::Shape(format!(
            "x_order {} cannot hold the x^2 component",
            c1.x_order()
        )));
    }
    let lambda = rec.lambda.map(|l| l.value("lambda")).transpose()?;
    Ok((PolyVectorField::saddle_node(c1, c2)?, lambda))
}

/// Parse a field file and bring its constant linear part to
/// `diag(-lambda, lambda)`. A declared `lambda` must match the spectrum.
pub fn parse_field(text: &str) -> Result<LoadedField> {
    let (raw, declared) = parse_field_components(text)?;
    let (field, diagonalizing) = diagonalize_constant_linear_part(&raw)?;
    if let Some(l) = declared {
        if (l - field.lambda).norm() > EPS_RES * field.lambda.norm().max(1.0) {
            return Err(Error::Shape(format!(
                "declared lambda {l} differs from the eigenvalue {}",
                field.lambda
            )));
        }
    }
    Ok(LoadedField {
        field,
        diagonalizing,
    })
}

/// Render a field in the file format, declaring `lambda`.
pub fn field_to_json(field: &SaddleNodeField) -> String {
    to_json(&FieldRecord {
        lambda: Some(field.lambda.into()),
        components: ComponentsRecord {
            comp_y1: (&field.field.comp_y1).into(),
            comp_y2: (&field.field.comp_y2).into(),
        },
    })
}

/// Parse a univariate coefficient file.
pub fn parse_uni_series(text: &str) -> Result<UniSeries> {
    let rec: UniSeriesRecord =
        serde_json::from_str(text).map_err(|e| json_error("univariate series", e))?;
    let coeffs = rec
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c.value(&format!("coefficient {k}")))
        .collect::<Result<Vec<_>>>()?;
    if coeffs.is_empty() {
        return Err(Error::Parse("univariate series has no coefficients".into()));
    }
    Ok(UniSeries::from_coeffs(coeffs.len(), &coeffs))
}

/// Render a univariate series in the file format.
pub fn uni_series_to_json(s: &UniSeries) -> String {
    to_json(&UniSeriesRecord {
        coeffs: s.coeffs().iter().map(|c| (*c).into()).collect(),
    })
}

fn parse_real(s: &str, item: &str) -> Result<f64> {
    let v: f64 = s
        .parse()
        .map_err(|_| Error::Parse(format!("'{item}': '{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(Error::Parse(format!("'{item}': '{s}' is not finite")));
    }
    Ok(v)
}

/// Parse `a`, `bi`, `a+bi` or `a-bi`, with `i` alone meaning `1i`.
pub fn parse_complex(text: &str) -> Result<C64> {
    let s = text.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(C64::new(parse_real(s, s)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        v => parse_real(v, s)?,
    };
    let re = if re.is_empty() {
        0.0
    } else {
        parse_real(re, s)?
    };
    Ok(C64::new(re, im))
}

/// Parse a comma-separated list of complex numbers.
pub fn parse_complex_list(text: &str) -> Result<Vec<C64>> {
    if text.trim().is_empty() {
        return Err(Error::Parse("empty list".into()));
    }
    text.split(',').map(parse_complex).collect()
}

/// Parse a comma-separated list of exactly `n` real numbers.
pub fn parse_real_list(text: &str, n: usize) -> Result<Vec<f64>> {
    let values = text
        .split(',')
        .map(|s| parse_real(s.trim(), text))
        .collect::<Result<Vec<_>>>()?;
    if values.len() != n {
        return Err(Error::Parse(format!(
            "expected {n} numbers, found {} in '{text}'",
            values.len()
        )));
    }
    Ok(values)
}
