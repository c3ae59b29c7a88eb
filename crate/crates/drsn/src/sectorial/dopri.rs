//! Dormand–Prince 5(4) for autonomous complex systems, with an adaptive
//! driver and a replay driver that reuses a recorded step grid.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];

const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;

/// What the step callback asks the driver to do next.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Control {
    Continue,
    Stop,
}

/// Step-size control parameters. Component `i` is scaled by
/// `tol[i].0 + tol[i].1 * |y_i|`.
#[derive(Debug, Clone)]
pub(crate) struct Dopri5 {
    pub tol: Vec<(f64, f64)>,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

struct Work {
    k: Vec<Vec<C64>>,
    stage: Vec<C64>,
    y_new: Vec<C64>,
}

impl Work {
    fn new(n: usize) -> Self {
        Work {
            k: vec![vec![C64::default(); n]; 7],
            stage: vec![C64::default(); n],
            y_new: vec![C64::default(); n],
        }
    }
}

impl Dopri5 {
    /// One step from `y` with `k[0] = f(y)` already filled; fills `y_new`,
    /// `k[6] = f(y_new)` and returns the scaled error norm.
    fn step<F>(&self, f: &mut F, y: &[C64], h: f64, w: &mut Work) -> f64
    where
        F: FnMut(&[C64], &mut [C64]),
    {
        let n = y.len();
        for s in 1..7 {
            for i in 0..n {
                let mut acc = C64::default();
                for (j, a) in A[s].iter().enumerate().take(s) {
                    if *a != 0.0 {
                        acc += w.k[j][i] * *a;
                    }
                }
                w.stage[i] = y[i] + acc * h;
            }
            f(&w.stage, &mut w.k[s]);
        }
        // The last stage point is the fifth-order solution.
        w.y_new.copy_from_slice(&w.stage);
        let mut sum = 0.0;
        for i in 0..n {
            let mut e = C64::default();
            for (j, c) in E.iter().enumerate() {
                if *c != 0.0 {
                    e += w.k[j][i] * *c;
                }
            }
            let (atol, rtol) = self.tol[i];
            let sc = atol + rtol * y[i].norm().max(w.y_new[i].norm());
            let e = (e * h).norm();
            let r = if sc > 0.0 {
                e / sc
            } else if e == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            sum += r * r;
        }
        (sum / n as f64).sqrt()
    }

    /// Adaptive integration from `y0` at `t = 0`. The callback sees every
    /// accepted `(t, y, f(y))`. Returns the accepted time grid, starting at 0.
    pub fn integrate<F, C>(
        &self,
        mut f: F,
        y0: &[C64],
        h0: f64,
        t_end: f64,
        mut on_step: C,
    ) -> Result<Vec<f64>>
    where
        F: FnMut(&[C64], &mut [C64]),
        C: FnMut(f64, &[C64], &[C64]) -> Result<Control>,
    {
        let n = y0.len();
        let mut w = Work::new(n);
        let mut y = y0.to_vec();
        f(&y, &mut w.k[0]);
        let mut t = 0.0;
        let mut h = h0.min(self.h_max);
        let mut grid = vec![0.0];
        let mut steps = 0usize;
        while t < t_end {
            if steps >= self.max_steps {
                return Err(Error::Budget(format!(
                    "{} steps reached at t = {t:.6e}",
                    self.max_steps
                )));
            }
            steps += 1;
            let last = t + h >= t_end;
            let t_new = if last { t_end } else { t + h };
            // Step by the grid difference so that replays repeat it bit for bit.
            h = t_new - t;
            let err = self.step(&mut f, &y, h, &mut w);
            if !err.is_finite() {
                h *= FAC_MIN;
                if h < self.h_min {
                    return Err(Error::Stiffness(t));
                }
                continue;
            }
            let fac = if err == 0.0 {
                FAC_MAX
            } else {
                (SAFETY * err.powf(-0.2)).clamp(FAC_MIN, FAC_MAX)
            };
            if err <= 1.0 {
                t = t_new;
                y.copy_from_slice(&w.y_new);
                let (first, rest) = w.k.split_at_mut(6);
                first[0].copy_from_slice(&rest[0]);
                grid.push(t);
                if on_step(t, &y, &w.k[0])? == Control::Stop {
                    break;
                }
                h = (h * fac).min(self.h_max);
            } else {
                h *= fac.min(1.0);
                if h < self.h_min {
                    return Err(Error::Stiffness(t));
                }
            }
        }
        Ok(grid)
    }

    /// Re-run the steps of a recorded grid without step-size control.
    /// Returns the largest scaled error estimate met along the way.
    pub fn replay<F, C>(&self, mut f: F, y0: &[C64], grid: &[f64], mut on_step: C) -> Result<f64>
    where
        F: FnMut(&[C64], &mut [C64]),
        C: FnMut(f64, &[C64], &[C64]) -> Result<Control>,
    {
        let n = y0.len();
        let mut w = Work::new(n);
        let mut y = y0.to_vec();
        f(&y, &mut w.k[0]);
        let mut worst: f64 = 0.0;
        for pair in grid.windows(2) {
            let h = pair[1] - pair[0];
            let err = self.step(&mut f, &y, h, &mut w);
            worst = worst.max(err);
            y.copy_from_slice(&w.y_new);
            let (first, rest) = w.k.split_at_mut(6);
            first[0].copy_from_slice(&rest[0]);
            if on_step(pair[1], &y, &w.k[0])? == Control::Stop {
                break;
            }
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solver() -> Dopri5 {
        Dopri5 {
            tol: vec![(1e-14, 1e-11)],
            h_max: 0.5,
            h_min: 1e-14,
            max_steps: 100_000,
        }
    }

    #[test]
    fn exponential_growth_matches_closed_form() {
        let rate = C64::new(-0.3, 2.0);
        let mut last = C64::default();
        solver()
            .integrate(
                |y, dy| dy[0] = rate * y[0],
                &[C64::new(1.0, 0.0)],
                1e-3,
                3.0,
                |_, y, _| {
                    last = y[0];
                    Ok(Control::Continue)
                },
            )
            .unwrap();
        assert!((last - (rate * 3.0).exp()).norm() < 1e-9);
    }

    #[test]
    fn replay_reproduces_adaptive_run() {
        let f = |y: &[C64], dy: &mut [C64]| dy[0] = C64::i() * y[0] * y[0];
        let y0 = [C64::new(0.2, 0.1)];
        let mut a = Vec::new();
        let grid = solver()
            .integrate(f, &y0, 1e-3, 10.0, |_, y, _| {
                a.push(y[0]);
                Ok(Control::Continue)
            })
            .unwrap();
        let mut b = Vec::new();
        solver()
            .replay(f, &y0, &grid, |_, y, _| {
                b.push(y[0]);
                Ok(Control::Continue)
            })
            .unwrap();
        assert_eq!(a, b);
    }
}
