//! Exponential flatness of the transition between the two sectorial
//! normalizations, measured on the overlap of the sectors.

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::maps::SectorialMaps;

/// Outcome of a flatness experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    /// `(|x|, |Psi_+ - Psi_-|)` at every sample.
    pub samples: Vec<(f64, f64)>,
    /// Differences at or below this are treated as noise.
    pub noise_floor: f64,
    /// Number of samples above the noise floor used by the fit.
    pub used: usize,
    /// Fit `difference ~ A exp(-B / |x|)`, when at least three samples are usable.
    pub fit: Option<(f64, f64)>,
    pub max_difference: f64,
}

impl FlatnessReport {
    /// Whether the fit detected exponential decay.
    pub fn detects_flatness(&self) -> bool {
        self.fit.is_some_and(|(_, b)| b > 0.0)
    }
}

/// Least-squares fit of `log d = log A - B / |x|`.
pub fn fit_flatness(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, d)| *x > 0.0 && *d > 0.0)
        .map(|(x, d)| (1.0 / x, d.ln()))
        .collect();
    if usable.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "{} usable samples",
            usable.len()
        )));
    }
    let n = usable.len() as f64;
    let mu = usable.iter().map(|p| p.0).sum::<f64>() / n;
    let mv = usable.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mu).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mu) * (p.1 - mv)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all samples at the same |x|".into(),
        ));
    }
    let slope = sxy / sxx;
    Ok(((mv - slope * mu).exp(), -slope))
}

/// Compare `Psi_+` and `Psi_-` along both real rays of the rotated chart,
/// where the two stable domains overlap, at `rays` radii `0.9 R 2^-k`
/// with `R` the radius of the overlap on those rays. The fiber point is
/// `y_fraction (1, i)` times the fiber radius of the overlap.
pub fn transition_flatness(
    plus: &SectorialMaps,
    minus: &SectorialMaps,
    y_fraction: f64,
    rays: usize,
) -> Result<FlatnessReport> {
    if !(y_fraction > 0.0 && y_fraction < 1.0) {
        return Err(Error::Config(format!(
            "fiber fraction {y_fraction} not in (0, 1)"
        )));
    }
    let field = plus.field();
    let (rp, ryp) = plus.geometry().ray_bounds(0.0);
    let (rm, rym) = minus.geometry().ray_bounds(0.0);
    let (r, ry) = (rp.min(rm), ryp.min(rym));
    let y = (
        C64::new(y_fraction * ry, 0.0),
        C64::new(0.0, y_fraction * ry),
    );
    let noise_floor = 100.0 * plus.options().tol_path.max(minus.options().tol_path);
    let mut samples = Vec::new();
    for k in 0..rays {
        let s = 0.9 * r * 0.5f64.powi(k as i32);
        for dir in [1.0, -1.0] {
            let p = field.unrotate([C64::new(dir * s, 0.0), y.0, y.1]);
            let a = plus.composed(p)?;
            let b = minus.composed(p)?;
            let diff = (a[1] - b[1]).norm().max((a[2] - b[2]).norm());
            samples.push((p[0].norm(), diff));
        }
    }
    let above: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|(_, d)| *d > noise_floor)
        .collect();
    let fit = if above.len() >= 3 {
        Some(fit_flatness(&above)?)
    } else {
        None
    };
    let max_difference = samples.iter().fold(0.0f64, |m, s| m.max(s.1));
    Ok(FlatnessReport {
        used: above.len(),
        samples,
        noise_floor,
        fit,
        max_difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fit_recovers_synthetic_constants() {
        let (a, b) = (3.0, 0.7);
        let pts: Vec<(f64, f64)> = (1..8)
            .map(|k| {
                let x = 0.4 / k as f64;
                (x, a * (-b / x).exp() * (1.0 + 0.01 * (k as f64).sin()))
            })
            .collect();
        let (fa, fb) = fit_flatness(&pts).unwrap();
        assert!((fa - a).abs() / a < 0.05, "A = {fa}");
        assert!((fb - b).abs() / b < 0.05, "B = {fb}");
    }
}
