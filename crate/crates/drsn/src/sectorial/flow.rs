//! The rescaled Cauchy problem `dX/dt = X_(+/-)` and its trajectories.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dopri::{Control, Dopri5};
use super::field::{FieldValues, SectorialField};
use super::geometry::{Membership, SectorGeometry};

/// Integrator settings shared by trajectories and path integrals.
///
/// The flow is integrated in the coordinates `(1/X, log y1, log y2)`, where
/// the model field is linear in `t`. `rtol` bounds the relative error of
/// `1/X` and the absolute error of `log y`; path integrals use `atol` and
/// `rtol` in the usual mixed sense.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
    /// Stop at this time.
    pub t_end: f64,
    /// Stop once `|X(t)|` drops below this.
    pub x_min: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        FlowOptions {
            rtol: 1e-10,
            atol: 0.0,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
            t_end: f64::INFINITY,
            x_min: 0.0,
        }
    }
}

impl FlowOptions {
    /// Solver for the three flow coordinates followed by `extra` quadratures.
    pub(crate) fn solver(&self, extra: usize) -> Dopri5 {
        let mut tol = vec![(0.0, self.rtol), (self.rtol, 0.0), (self.rtol, 0.0)];
        tol.extend(std::iter::repeat_n((self.atol, self.rtol), extra));
        Dopri5 {
            tol,
            h_max: self.h_max,
            h_min: 1e-13,
            max_steps: self.max_steps,
        }
    }
}

/// Integration chart `(1/X, log y1, log y2)`. A vanishing `y_j` stays zero
/// along the flow and is carried as a flag.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogChart {
    zero: [bool; 2],
}

impl LogChart {
    /// Chart and coordinates of a rotated point with `X != 0`.
    pub(crate) fn at(q: [C64; 3]) -> (Self, [C64; 3]) {
        let zero = [q[1] == C64::default(), q[2] == C64::default()];
        let log = |z: C64, is_zero: bool| if is_zero { C64::default() } else { z.ln() };
        (
            LogChart { zero },
            [q[0].inv(), log(q[1], zero[0]), log(q[2], zero[1])],
        )
    }

    /// Rotated point from chart coordinates.
    pub(crate) fn decode(&self, s: &[C64]) -> [C64; 3] {
        let exp = |l: C64, is_zero: bool| if is_zero { C64::default() } else { l.exp() };
        [s[0].inv(), exp(s[1], self.zero[0]), exp(s[2], self.zero[1])]
    }

    /// Chart derivatives of the rescaled problem; returns the rotated point
    /// and the field data there.
    pub(crate) fn rhs(
        &self,
        field: &SectorialField,
        sign: f64,
        s: &[C64],
        ds: &mut [C64],
    ) -> ([C64; 3], FieldValues) {
        let q = self.decode(s);
        let v = field.values(q);
        let one = C64::new(1.0, 0.0);
        let k = C64::new(0.0, sign) / v.den;
        ds[0] = -k;
        ds[1] = if self.zero[0] {
            C64::default()
        } else {
            k * (-(one + v.c) + field.a1() * q[0] + v.r)
        };
        ds[2] = if self.zero[1] {
            C64::default()
        } else {
            k * (one + v.c + field.a2() * q[0] + v.r)
        };
        (q, v)
    }
}

/// A sampled integral curve, stored in the original chart.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trajectory {
    pub lambda: C64,
    pub times: Vec<f64>,
    pub states: Vec<[C64; 3]>,
    pub flags: Vec<Membership>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// State `i` in the rotated chart.
    pub fn rotated(&self, i: usize) -> [C64; 3] {
        let p = self.states[i];
        [p[0] / self.lambda, p[1], p[2]]
    }

    /// First sampled time at which the state is in `Sigma`.
    pub fn sigma_entry(&self) -> Option<f64> {
        self.flags
            .iter()
            .position(|f| f.in_sigma)
            .map(|i| self.times[i])
    }
}

fn stability_error(t: f64, q: [C64; 3], field: &SectorialField) -> Error {
    let p = field.unrotate(q);
    Error::StabilityViolation {
        t,
        state: format!("x = {}, y1 = {}, y2 = {}", p[0], p[1], p[2]),
    }
}

/// Reject starts outside `Omega`.
pub(crate) fn check_start(
    field: &SectorialField,
    geom: &SectorGeometry,
    q: [C64; 3],
) -> Result<Membership> {
    let m = geom.membership_rotated(q);
    if !m.in_omega {
        let p = field.unrotate(q);
        return Err(Error::Geometry(format!(
            "start x = {}, y = ({}, {}) is not in the stable domain",
            p[0], p[1], p[2]
        )));
    }
    Ok(m)
}

/// Initial step of an adaptive run.
pub(crate) const INITIAL_STEP: f64 = 1e-2;

struct Recorder<'a> {
    field: &'a SectorialField,
    geom: &'a SectorGeometry,
    opts: &'a FlowOptions,
    traj: Trajectory,
}

impl Recorder<'_> {
    fn push(&mut self, t: f64, q: [C64; 3]) -> Result<Control> {
        let m = self.geom.membership_rotated(q);
        if !m.in_omega {
            return Err(stability_error(t, q, self.field));
        }
        self.traj.times.push(t);
        self.traj.states.push(self.field.unrotate(q));
        self.traj.flags.push(m);
        if q[0].norm() < self.opts.x_min || t >= self.opts.t_end {
            return Ok(Control::Stop);
        }
        Ok(Control::Continue)
    }
}

fn start(
    field: &SectorialField,
    geom: &SectorGeometry,
    p0: [C64; 3],
    opts: &FlowOptions,
) -> Result<([C64; 3], Trajectory)> {
    if !opts.t_end.is_finite() && opts.x_min <= 0.0 {
        return Err(Error::Config(
            "integration needs a finite t_end or a positive x_min".into(),
        ));
    }
    let q0 = field.rotate(p0);
    let m = check_start(field, geom, q0)?;
    let traj = Trajectory {
        lambda: field.lambda(),
        times: vec![0.0],
        states: vec![p0],
        flags: vec![m],
    };
    Ok((q0, traj))
}

/// Integrate the rescaled Cauchy problem from `p0` (original chart) until
/// `t_end` or `|X| < x_min`. Leaving `Omega` is an error.
pub fn integrate_flow(
    field: &SectorialField,
    p0: [C64; 3],
    geom: &SectorGeometry,
    opts: &FlowOptions,
) -> Result<Trajectory> {
    let (q0, traj) = start(field, geom, p0, opts)?;
    let sign = geom.sign.factor();
    let (chart, s0) = LogChart::at(q0);
    let mut rec = Recorder {
        field,
        geom,
        opts,
        traj,
    };
    opts.solver(0).integrate(
        |s, ds| {
            chart.rhs(field, sign, s, ds);
        },
        &s0,
        INITIAL_STEP,
        opts.t_end,
        |t, s, _| rec.push(t, chart.decode(s)),
    )?;
    Ok(rec.traj)
}

/// Integrate from `p0` on a recorded time grid, without step-size control.
pub fn replay_flow(
    field: &SectorialField,
    p0: [C64; 3],
    geom: &SectorGeometry,
    grid: &[f64],
    opts: &FlowOptions,
) -> Result<Trajectory> {
    let replay_opts = FlowOptions {
        t_end: grid.last().copied().unwrap_or(0.0),
        ..*opts
    };
    let (q0, traj) = start(field, geom, p0, &replay_opts)?;
    let sign = geom.sign.factor();
    let (chart, s0) = LogChart::at(q0);
    let mut rec = Recorder {
        field,
        geom,
        opts: &replay_opts,
        traj,
    };
    opts.solver(0).replay(
        |s, ds| {
            chart.rhs(field, sign, s, ds);
        },
        &s0,
        grid,
        |t, s, _| rec.push(t, chart.decode(s)),
    )?;
    Ok(rec.traj)
}
