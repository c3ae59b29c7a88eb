//! The sectorial normalizing maps: the radial part `phi = (x, y e^rho)`, the
//! tangential part `psi = (x, z1 e^-chi, z2 e^chi)` and `Psi = psi o phi`.
//!
//! `Psi` is evaluated without nesting path integrals: `chi o phi` solves
//! `L_Y(chi o phi) = -(D - c(v e^{2 rho}))` along the paths of the prepared
//! field itself, where `rho` at a path point is `rho(p)` minus the partial
//! integral up to that point.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::Serialize;

use crate::error::{Error, Result};

use super::field::SectorialField;
use super::geometry::SectorGeometry;
use super::path::{run_quadratures, PathOptions, PathPoint, QuadRun};

/// Which of the three maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Radial,
    Tangential,
    Composed,
}

/// Time functions of `Psi` at a base point, with the data of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MapTimes {
    /// `rho`, solving `L_Y(rho) = -R`.
    pub rho: C64,
    /// `chi o phi`, solving `L_Y(chi o phi) = -(D - c(v e^{2 rho}))`.
    pub chi: C64,
    pub tail_bound: f64,
    pub t_max: f64,
    #[serde(skip)]
    pub grid: Vec<f64>,
}

/// Sampled bounds on the time functions over `S(r', epsilon) x D(0, r_y')`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Smallness {
    pub samples: usize,
    pub sup_rho: f64,
    pub sup_chi: f64,
    /// `max |rho| / (|x|^{N+1} |y|)`.
    pub l_rho: f64,
    /// `max |chi| / (|x|^N |y|)`.
    pub l_chi: f64,
}

/// Bound on `exp(2 sup |f|)` that makes the exponential maps injective.
pub const SMALLNESS_BOUND: f64 = 1.25;

/// The maps of one sector.
#[derive(Debug, Clone)]
pub struct SectorialMaps {
    field: SectorialField,
    geom: SectorGeometry,
    options: PathOptions,
    smallness: Smallness,
}

/// One of the maps, as a view on `SectorialMaps`.
#[derive(Debug, Clone, Copy)]
pub struct SectorialMap<'a> {
    pub kind: MapKind,
    /// The `M` of the homological equation behind the time function.
    pub order: usize,
    maps: &'a SectorialMaps,
}

impl SectorialMap<'_> {
    /// `rho(p)` for the radial map, `chi(p)` for the tangential map (at a
    /// point of the target of `phi`), `chi(phi(p))` for the composition.
    pub fn time_function(&self, p: [C64; 3]) -> Result<C64> {
        match self.kind {
            MapKind::Radial => self.maps.rho(p),
            MapKind::Tangential => Ok(self.maps.times(self.maps.invert_phi(p)?)?.chi),
            MapKind::Composed => Ok(self.maps.times(p)?.chi),
        }
    }

    pub fn apply(&self, p: [C64; 3]) -> Result<[C64; 3]> {
        match self.kind {
            MapKind::Radial => self.maps.phi(p),
            MapKind::Tangential => self.maps.psi(p),
            MapKind::Composed => self.maps.composed(p),
        }
    }
}

impl SectorialMaps {
    pub fn field(&self) -> &SectorialField {
        &self.field
    }

    pub fn geometry(&self) -> &SectorGeometry {
        &self.geom
    }

    pub fn options(&self) -> &PathOptions {
        &self.options
    }

    pub fn smallness(&self) -> &Smallness {
        &self.smallness
    }

    pub fn radial(&self) -> SectorialMap<'_> {
        self.map(MapKind::Radial)
    }

    pub fn tangential(&self) -> SectorialMap<'_> {
        self.map(MapKind::Tangential)
    }

    pub fn composition(&self) -> SectorialMap<'_> {
        self.map(MapKind::Composed)
    }

    pub fn map(&self, kind: MapKind) -> SectorialMap<'_> {
        let n = self.field.order();
        let order = match kind {
            MapKind::Radial => n + 1,
            MapKind::Tangential | MapKind::Composed => n,
        };
        SectorialMap {
            kind,
            order,
            maps: self,
        }
    }

    /// Whether the tangential integrand depends on `rho`, which then needs
    /// a second pass once `rho(p)` is known.
    fn coupled(&self, p: [C64; 3]) -> bool {
        self.field.resonant().max_abs() > 0.0
            && p[1] * p[2] != C64::default()
            && self.field.radial().max_abs() > 0.0
    }

    fn run(&self, p: [C64; 3], rho_p: Option<C64>, grid: Option<&[f64]>) -> Result<QuadRun> {
        let n = self.field.order();
        let field = &self.field;
        let integrand = |pt: &PathPoint, partial: &[C64], out: &mut [C64]| {
            let v = pt.values;
            out[0] = -v.r / v.den;
            let drift = match rho_p {
                Some(rho_p) if rho_p != partial[0] => {
                    let w = pt.q[1] * pt.q[2];
                    field.c_of(w) - field.c_of(w * ((rho_p - partial[0]) * 2.0).exp())
                }
                _ => C64::default(),
            };
            out[1] = -(v.d + drift) / v.den;
        };
        run_quadratures(
            field,
            &self.geom,
            p,
            &[n + 1, n],
            integrand,
            &self.options,
            grid,
        )
    }

    fn finish(run: QuadRun) -> MapTimes {
        MapTimes {
            rho: run.values[0],
            chi: run.values[1],
            tail_bound: run.tail_bound,
            t_max: run.t_max,
            grid: run.grid,
        }
    }

    /// `rho` and `chi o phi` at `p`, on an adaptive grid.
    pub fn times(&self, p: [C64; 3]) -> Result<MapTimes> {
        let first = self.run(p, None, None)?;
        if first.tail_bound >= self.options.tol_path {
            return Err(Error::Budget(format!(
                "tail bound {:.3e} above {:.1e} at t = {:.3e}",
                first.tail_bound, self.options.tol_path, first.t_max
            )));
        }
        if !self.coupled(p) {
            return Ok(Self::finish(first));
        }
        let grid = first.grid.clone();
        Ok(Self::finish(self.run(
            p,
            Some(first.values[0]),
            Some(&grid),
        )?))
    }

    /// `rho` and `chi o phi` at `p`, on a recorded grid.
    pub fn times_on_grid(&self, p: [C64; 3], grid: &[f64]) -> Result<MapTimes> {
        let first = self.run(p, None, Some(grid))?;
        if !self.coupled(p) {
            return Ok(Self::finish(first));
        }
        Ok(Self::finish(self.run(
            p,
            Some(first.values[0]),
            Some(grid),
        )?))
    }

    fn rho(&self, p: [C64; 3]) -> Result<C64> {
        let n = self.field.order();
        let integrand =
            |pt: &PathPoint, _: &[C64], out: &mut [C64]| out[0] = -pt.values.r / pt.values.den;
        let run = run_quadratures(
            &self.field,
            &self.geom,
            p,
            &[n + 1],
            integrand,
            &self.options,
            None,
        )?;
        Ok(run.values[0])
    }

    /// `phi(p) = (x, y1 e^rho, y2 e^rho)`.
    pub fn phi(&self, p: [C64; 3]) -> Result<[C64; 3]> {
        let e = self.rho(p)?.exp();
        Ok([p[0], p[1] * e, p[2] * e])
    }

    /// Solve `phi(p) = z` by the fixed point `y = z e^{-rho(x, y)}`.
    pub fn invert_phi(&self, z: [C64; 3]) -> Result<[C64; 3]> {
        let scale = z[1].norm().max(z[2].norm());
        let mut p = z;
        for _ in 0..60 {
            let e = (-self.rho(p)?).exp();
            let next = [z[0], z[1] * e, z[2] * e];
            let change = (next[1] - p[1]).norm().max((next[2] - p[2]).norm());
            p = next;
            if change <= 1e-14 * scale {
                return Ok(p);
            }
        }
        Err(Error::Budget(
            "inverse of phi did not converge in 60 iterations".into(),
        ))
    }

    /// `psi(z) = (x, z1 e^-chi, z2 e^chi)` with `chi(z) = (chi o phi)(phi^-1(z))`.
    pub fn psi(&self, z: [C64; 3]) -> Result<[C64; 3]> {
        let chi = self.times(self.invert_phi(z)?)?.chi;
        Ok([z[0], z[1] * (-chi).exp(), z[2] * chi.exp()])
    }

    /// `Psi(p) = psi(phi(p)) = (x, y1 e^{rho - chi}, y2 e^{rho + chi})`.
    pub fn composed(&self, p: [C64; 3]) -> Result<[C64; 3]> {
        Ok(apply_times(p, &self.times(p)?))
    }

    /// `Psi(p)` on a recorded grid.
    pub fn composed_on_grid(&self, p: [C64; 3], grid: &[f64]) -> Result<[C64; 3]> {
        Ok(apply_times(p, &self.times_on_grid(p, grid)?))
    }

    /// Coefficient of `y1^n1 y2^n2` in component `j` (1 or 2) of `Psi(x, .)`,
    /// by the discrete Cauchy formula on the torus `|y1| = |y2| = radius`
    /// with `points` nodes per circle. All runs reuse the grid of the run
    /// from the node `(radius, radius)`, so the result is a smooth function
    /// of `x`. Also returns the nodes, for the same transform of a series.
    pub fn map_coefficient(
        &self,
        x: C64,
        j: usize,
        n1: usize,
        n2: usize,
        radius: f64,
        points: usize,
    ) -> Result<C64> {
        let nodes = torus_nodes(radius, points);
        let base = self.times([x, nodes[0].0, nodes[0].1])?;
        let mut values = Vec::with_capacity(nodes.len());
        for (y1, y2) in &nodes {
            let q = self.composed_on_grid([x, *y1, *y2], &base.grid)?;
            values.push(q[j]);
        }
        Ok(cauchy_coefficient(&values, n1, n2, radius, points))
    }
}

fn apply_times(p: [C64; 3], t: &MapTimes) -> [C64; 3] {
    [
        p[0],
        p[1] * (t.rho - t.chi).exp(),
        p[2] * (t.rho + t.chi).exp(),
    ]
}

/// Nodes `(radius e^{2 pi i k / P}, radius e^{2 pi i l / P})`, `k` outer.
pub fn torus_nodes(radius: f64, points: usize) -> Vec<(C64, C64)> {
    let mut out = Vec::with_capacity(points * points);
    for k in 0..points {
        for l in 0..points {
            let a = 2.0 * PI * k as f64 / points as f64;
            let b = 2.0 * PI * l as f64 / points as f64;
            out.push((C64::from_polar(radius, a), C64::from_polar(radius, b)));
        }
    }
    out
}

/// Discrete Cauchy coefficient of `y1^n1 y2^n2` from values at `torus_nodes`.
pub fn cauchy_coefficient(values: &[C64], n1: usize, n2: usize, radius: f64, points: usize) -> C64 {
    let mut acc = C64::default();
    for k in 0..points {
        for l in 0..points {
            let a = 2.0 * PI * (k * n1) as f64 / points as f64;
            let b = 2.0 * PI * (l * n2) as f64 / points as f64;
            acc += values[k * points + l] * C64::from_polar(1.0, -(a + b));
        }
    }
    acc / ((points * points) as f64 * radius.powi((n1 + n2) as i32))
}

/// Build `phi`, `psi` and `Psi` on the sector of `geom`, after checking
/// `exp(2 sup |rho|)` and `exp(2 sup |chi|)` against 5/4 on samples of
/// `Omega` near its outer boundary `|X| = r`, `|y| = r_y`, where both time
/// functions are largest.
pub fn build_sectorial_maps(
    field: &SectorialField,
    geom: &SectorGeometry,
    options: &PathOptions,
) -> Result<SectorialMaps> {
    geom.validate()?;
    let mut maps = SectorialMaps {
        field: field.clone(),
        geom: geom.clone(),
        options: *options,
        smallness: Smallness {
            samples: 0,
            sup_rho: 0.0,
            sup_chi: 0.0,
            l_rho: 0.0,
            l_chi: 0.0,
        },
    };
    let n = field.order();
    let xr = 0.9 * geom.r;
    let xa = field.lambda().norm() * xr;
    let yr = 0.9 * geom.r_y;
    let edge = geom.omega.asin();
    let mut s = maps.smallness.clone();
    for j in 1..=3 {
        let theta = edge + (PI - 2.0 * edge) * j as f64 / 4.0;
        let w = geom.to_plus_frame(C64::from_polar(xr, theta));
        for (a1, a2) in [(0.0, 0.0), (0.5 * PI, 1.0)] {
            let p = field.unrotate([w, C64::from_polar(yr, a1), C64::from_polar(yr, a2)]);
            let t = maps.times(p)?;
            s.samples += 1;
            s.sup_rho = s.sup_rho.max(t.rho.norm());
            s.sup_chi = s.sup_chi.max(t.chi.norm());
            s.l_rho = s.l_rho.max(t.rho.norm() / (xa.powi(n as i32 + 1) * yr));
            s.l_chi = s.l_chi.max(t.chi.norm() / (xa.powi(n as i32) * yr));
        }
    }
    let measured = (2.0 * s.sup_rho.max(s.sup_chi)).exp();
    if measured > SMALLNESS_BOUND {
        // chi is O(|x|^N) on the sector, rho smaller still.
        let target = SMALLNESS_BOUND.ln() / 2.0;
        let factor = (target / s.sup_rho.max(s.sup_chi)).powf(1.0 / n as f64);
        return Err(Error::ShrinkDomain {
            measured,
            suggested_r: 0.9 * factor * geom.r,
        });
    }
    maps.smallness = s;
    Ok(maps)
}

/// `build_sectorial_maps`, retrying at the suggested radius while the
/// smallness criterion fails (at most eight times).
pub fn build_sectorial_maps_shrinking(
    field: &SectorialField,
    geom: &SectorGeometry,
    options: &PathOptions,
) -> Result<SectorialMaps> {
    let mut geom = geom.clone();
    for _ in 0..8 {
        match build_sectorial_maps(field, &geom, options) {
            Err(Error::ShrinkDomain { suggested_r, .. }) => geom = geom.with_radius(suggested_r),
            other => return other,
        }
    }
    build_sectorial_maps(field, &geom, options)
}
