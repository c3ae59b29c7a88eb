//! Solutions of homological equations `L_Y(alpha) = x^{M+1} A` as integrals
//! of `x^{M+1} A dx / x^2` along asymptotic paths.

use std::collections::VecDeque;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dopri::Control;
use super::field::{FieldValues, SectorialField};
use super::flow::{check_start, FlowOptions, LogChart, INITIAL_STEP};
use super::geometry::SectorGeometry;

/// Settings of the path integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathOptions {
    pub flow: FlowOptions,
    /// Target for the tail bound of every integral.
    pub tol_path: f64,
    /// Smallest `kappa (t - t_Sigma)` before the tail bound is trusted.
    pub min_decay: f64,
}

impl Default for PathOptions {
    fn default() -> Self {
        PathOptions {
            flow: FlowOptions::default(),
            tol_path: 1e-9,
            min_decay: 4.0,
        }
    }
}

/// Value of a path integral with its truncation data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathIntegral {
    pub value: C64,
    /// Bound on the neglected part of the integral beyond `t_max`.
    pub tail_bound: f64,
    pub t_max: f64,
    pub steps: usize,
    pub sigma_entry: Option<f64>,
    /// Time grid of the run, for replay at nearby base points.
    #[serde(skip)]
    pub grid: Vec<f64>,
}

/// A point of an asymptotic path, as seen by an integrand.
#[derive(Debug, Clone, Copy)]
pub struct PathPoint {
    /// Rotated chart coordinates.
    pub q: [C64; 3],
    pub values: FieldValues,
}

/// Sliding maximum over the last decade of `t - t_Sigma`.
struct DecadeMax {
    window: VecDeque<(f64, f64)>,
}

impl DecadeMax {
    fn new() -> Self {
        DecadeMax {
            window: VecDeque::new(),
        }
    }

    fn push(&mut self, s: f64, w: f64) -> f64 {
        while let Some(&(_, last)) = self.window.back() {
            if last <= w {
                self.window.pop_back();
            } else {
                break;
            }
        }
        self.window.push_back((s, w));
        while let Some(&(front, _)) = self.window.front() {
            if front < s / 10.0 && self.window.len() > 1 {
                self.window.pop_front();
            } else {
                break;
            }
        }
        self.window.front().map_or(0.0, |e| e.1)
    }
}

/// Tail tracker: `|G(t)| <= C' (1 + kappa (t - t_Sigma))^{-(M+1)}` with `C'`
/// measured over the last decade, integrated from `t` to infinity.
struct Tails {
    orders: Vec<usize>,
    kappa_rate: f64,
    entry: Option<(f64, f64)>,
    maxima: Vec<DecadeMax>,
    bounds: Vec<f64>,
}

impl Tails {
    fn new(orders: &[usize], omega_minus_delta: f64) -> Self {
        Tails {
            orders: orders.to_vec(),
            kappa_rate: omega_minus_delta,
            entry: None,
            maxima: orders.iter().map(|_| DecadeMax::new()).collect(),
            bounds: vec![f64::INFINITY; orders.len()],
        }
    }

    /// Record a sample; returns `kappa (t - t_Sigma)` once inside `Sigma`.
    fn record(&mut self, t: f64, x_abs: f64, in_sigma: bool, g: &[C64]) -> Option<f64> {
        if self.entry.is_none() && in_sigma {
            self.entry = Some((t, self.kappa_rate * x_abs));
        }
        let (t_s, kappa) = self.entry?;
        let s = t - t_s;
        let base = 1.0 + kappa * s;
        for (j, m) in self.orders.iter().enumerate() {
            let w = g[j].norm() * base.powi(*m as i32 + 1);
            let c = self.maxima[j].push(s, w);
            self.bounds[j] = c / (kappa * *m as f64 * base.powi(*m as i32));
        }
        Some(kappa * s)
    }

    fn worst(&self) -> f64 {
        self.bounds.iter().fold(0.0, |a, b| a.max(*b))
    }
}

/// Result of a run with several integrands.
pub(crate) struct QuadRun {
    pub values: Vec<C64>,
    pub tail_bound: f64,
    pub t_max: f64,
    pub steps: usize,
    pub sigma_entry: Option<f64>,
    pub grid: Vec<f64>,
}

/// Integrate the rescaled flow from `p0` together with `q_j' = -/+ i G_j`,
/// where `integrand` writes `G_j = x^{M_j + 1} A_j / (1 + bX + C)` given
/// the path point and the current partial integrals. With `grid`, the
/// recorded steps are replayed instead of chosen adaptively.
pub(crate) fn run_quadratures<F>(
    field: &SectorialField,
    geom: &SectorGeometry,
    p0: [C64; 3],
    orders: &[usize],
    mut integrand: F,
    opts: &PathOptions,
    grid: Option<&[f64]>,
) -> Result<QuadRun>
where
    F: FnMut(&PathPoint, &[C64], &mut [C64]),
{
    if orders.contains(&0) {
        return Err(Error::Config(
            "homological order M must be at least 1".into(),
        ));
    }
    let nq = orders.len();
    let q0 = field.rotate(p0);
    check_start(field, geom, q0)?;
    let sign = geom.sign.factor();
    let rot = C64::new(0.0, -sign);
    let (chart, s0) = LogChart::at(q0);
    let mut y0 = vec![C64::default(); 3 + nq];
    y0[..3].copy_from_slice(&s0);
    let mut g = vec![C64::default(); nq];
    let mut rhs = |y: &[C64], dy: &mut [C64]| {
        let (q, values) = chart.rhs(field, sign, &y[..3], &mut dy[..3]);
        integrand(&PathPoint { q, values }, &y[3..], &mut dy[3..]);
        for d in &mut dy[3..] {
            *d *= rot;
        }
    };
    let mut tails = Tails::new(orders, geom.omega - geom.delta);
    let mut stability: Option<Error> = None;
    let mut last = vec![C64::default(); nq];
    let mut last_t = 0.0;
    let mut steps = 0usize;
    let mut on_step = |t: f64, y: &[C64], dy: &[C64], adaptive: bool| -> Result<Control> {
        steps += 1;
        let q = chart.decode(&y[..3]);
        let m = geom.membership_rotated(q);
        if !m.in_omega {
            let p = field.unrotate(q);
            stability = Some(Error::StabilityViolation {
                t,
                state: format!("x = {}, y1 = {}, y2 = {}", p[0], p[1], p[2]),
            });
            return Ok(Control::Stop);
        }
        g.copy_from_slice(&dy[3..]);
        last.copy_from_slice(&y[3..]);
        last_t = t;
        let progress = tails.record(t, q[0].norm(), m.in_sigma, &g);
        if adaptive {
            if let Some(s) = progress {
                if s >= opts.min_decay && tails.worst() < opts.tol_path {
                    return Ok(Control::Stop);
                }
            }
        }
        Ok(Control::Continue)
    };
    let solver = opts.flow.solver(nq);
    let grid = match grid {
        Some(gr) => {
            solver.replay(&mut rhs, &y0, gr, |t, y, dy| on_step(t, y, dy, false))?;
            gr.to_vec()
        }
        None => solver.integrate(&mut rhs, &y0, INITIAL_STEP, opts.flow.t_end, |t, y, dy| {
            on_step(t, y, dy, true)
        })?,
    };
    if let Some(e) = stability {
        return Err(e);
    }
    let tail_bound = tails.worst();
    Ok(QuadRun {
        values: last,
        tail_bound,
        t_max: last_t,
        steps,
        sigma_entry: tails.entry.map(|e| e.0),
        grid,
    })
}

fn single(run: QuadRun) -> PathIntegral {
    PathIntegral {
        value: run.values[0],
        tail_bound: run.tail_bound,
        t_max: run.t_max,
        steps: run.steps,
        sigma_entry: run.sigma_entry,
        grid: run.grid,
    }
}

/// Integrand `x^{M+1} A(x, y)` of the original chart, written in the rotated one:
/// `lambda^M X^{M+1} A(lambda X, y)`.
fn original_integrand<'a>(
    field: &'a SectorialField,
    a: &'a dyn Fn(C64, C64, C64) -> C64,
    m: usize,
) -> impl FnMut(&PathPoint, &[C64], &mut [C64]) + 'a {
    let lambda = field.lambda();
    let lm = lambda.powu(m as u32);
    move |pt, _, out| {
        let x = pt.q[0];
        out[0] = lm * x.powu(m as u32 + 1) * a(lambda * x, pt.q[1], pt.q[2]) / pt.values.den;
    }
}

/// `alpha(p0) = -int_gamma x^{M+1} A dx / x^2` along the asymptotic path from
/// `p0` (original chart), which solves `L_Y(alpha) = x^{M+1} A`. The run
/// stops once the tail bound is below `tol_path`.
pub fn homological_path_integral(
    field: &SectorialField,
    a: &dyn Fn(C64, C64, C64) -> C64,
    m: usize,
    p0: [C64; 3],
    geom: &SectorGeometry,
    opts: &PathOptions,
) -> Result<PathIntegral> {
    let f = original_integrand(field, a, m);
    let run = run_quadratures(field, geom, p0, &[m], f, opts, None)?;
    if run.tail_bound >= opts.tol_path {
        return Err(Error::Budget(format!(
            "tail bound {:.3e} above {:.1e} at t = {:.3e}",
            run.tail_bound, opts.tol_path, run.t_max
        )));
    }
    Ok(single(run))
}

/// Same integral on a recorded time grid.
pub fn homological_path_integral_on_grid(
    field: &SectorialField,
    a: &dyn Fn(C64, C64, C64) -> C64,
    m: usize,
    p0: [C64; 3],
    geom: &SectorGeometry,
    grid: &[f64],
    opts: &PathOptions,
) -> Result<PathIntegral> {
    let f = original_integrand(field, a, m);
    Ok(single(run_quadratures(
        field,
        geom,
        p0,
        &[m],
        f,
        opts,
        Some(grid),
    )?))
}

/// Direction `Y(p)` and parameter step for a finite-difference Lie derivative:
/// the largest relative coordinate change equals `rel_step`.
fn fd_step(field: &SectorialField, p: [C64; 3], rel_step: f64) -> ([C64; 3], f64) {
    let dir = field.y(p);
    let mut rate: f64 = 0.0;
    for i in 0..3 {
        if p[i].norm() > 0.0 {
            rate = rate.max(dir[i].norm() / p[i].norm());
        }
    }
    (dir, rel_step / rate.max(f64::MIN_POSITIVE))
}

/// `L_Y(f)(p)` by fourth-order central differences along `Y(p)`.
pub fn lie_derivative_fd<F>(field: &SectorialField, f: F, p: [C64; 3], rel_step: f64) -> Result<C64>
where
    F: Fn([C64; 3]) -> Result<C64>,
{
    let (dir, h) = fd_step(field, p, rel_step);
    let at = |s: f64| [p[0] + dir[0] * s, p[1] + dir[1] * s, p[2] + dir[2] * s];
    let near = f(at(h))? - f(at(-h))?;
    let far = f(at(2.0 * h))? - f(at(-2.0 * h))?;
    Ok((near * 8.0 - far) / (12.0 * h))
}

/// Tail tolerance of [`homological_residual`] relative to `|x^M A|`.
const RESIDUAL_TAIL_FRACTION: f64 = 1e-9;

/// Relative step of the finite differences in [`homological_residual`].
const RESIDUAL_FD_STEP: f64 = 1e-3;

/// Relative residual `|L_Y(alpha) - x^{M+1} A| / |x^{M+1} A|` at `p`, with
/// `alpha` evaluated on the step grid of the run from `p`.
pub fn homological_residual(
    field: &SectorialField,
    a: &dyn Fn(C64, C64, C64) -> C64,
    m: usize,
    p: [C64; 3],
    geom: &SectorGeometry,
    opts: &PathOptions,
) -> Result<f64> {
    let target = p[0].powu(m as u32 + 1) * a(p[0], p[1], p[2]);
    // tail tolerance relative to the target
    let scaled = target.norm() * RESIDUAL_TAIL_FRACTION / p[0].norm().max(f64::MIN_POSITIVE);
    let opts = &PathOptions {
        tol_path: opts.tol_path.min(scaled),
        ..*opts
    };
    let base = homological_path_integral(field, a, m, p, geom, opts)?;
    let grid = base.grid;
    let lie = lie_derivative_fd(
        field,
        |q| Ok(homological_path_integral_on_grid(field, a, m, q, geom, &grid, opts)?.value),
        p,
        RESIDUAL_FD_STEP,
    )?;
    Ok((lie - target).norm() / target.norm().max(f64::MIN_POSITIVE))
}
