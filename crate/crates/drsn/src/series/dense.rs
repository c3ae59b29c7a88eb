//! Dense coefficient engine behind the heavy series operations.
//!
//! Coefficients live in a `K x ny` array where the y-monomials are ordered
//! by total degree, so the monomials of degree at most `s` form a prefix of
//! length `(s + 1)(s + 2) / 2`. Products look up exponent sums in a
//! precomputed addition table.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64 as C64;

const ZERO: C64 = C64::new(0.0, 0.0);

/// Graded ordering of the y-monomials of total degree at most `d`.
#[derive(Debug)]
pub(crate) struct Layout {
    pub d: usize,
    pub ny: usize,
    pub exps: Vec<(usize, usize)>,
    pub degs: Vec<usize>,
    add: Vec<u32>,
}

/// Position of `y1^n1 y2^n2` in the graded ordering.
pub(crate) fn y_index(n1: usize, n2: usize) -> usize {
    let s = n1 + n2;
    s * (s + 1) / 2 + n2
}

/// Number of y-monomials of total degree at most `s`.
pub(crate) fn prefix_len(s: usize) -> usize {
    (s + 1) * (s + 2) / 2
}

impl Layout {
    fn build(d: usize) -> Self {
        let ny = prefix_len(d);
        let mut exps = vec![(0, 0); ny];
        let mut degs = vec![0; ny];
        for s in 0..=d {
            for n2 in 0..=s {
                let i = y_index(s - n2, n2);
                exps[i] = (s - n2, n2);
                degs[i] = s;
            }
        }
        let mut add = vec![u32::MAX; ny * ny];
        for a in 0..ny {
            for b in 0..ny {
                let (a1, a2) = exps[a];
                let (b1, b2) = exps[b];
                if degs[a] + degs[b] <= d {
                    add[a * ny + b] = y_index(a1 + b1, a2 + b2) as u32;
                }
            }
        }
        Layout {
            d,
            ny,
            exps,
            degs,
            add,
        }
    }

    pub fn get(d: usize) -> Arc<Layout> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Layout>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("layout cache poisoned");
        guard
            .entry(d)
            .or_insert_with(|| Arc::new(Layout::build(d)))
            .clone()
    }
}

/// Dense truncated series in `(x, y1, y2)`: keeps `m < k`, `n1 + n2 <= d`.
#[derive(Debug, Clone)]
pub(crate) struct Dense {
    pub k: usize,
    pub layout: Arc<Layout>,
    pub data: Vec<C64>,
}

impl Dense {
    pub fn zeros(k: usize, d: usize) -> Self {
        let layout = Layout::get(d);
        let data = vec![ZERO; k * layout.ny];
        Dense { k, layout, data }
    }

    pub fn d(&self) -> usize {
        self.layout.d
    }

    pub fn ny(&self) -> usize {
        self.layout.ny
    }

    pub fn set(&mut self, m: usize, n1: usize, n2: usize, c: C64) {
        let ny = self.ny();
        self.data[m * ny + y_index(n1, n2)] = c;
    }

    pub fn constant(k: usize, d: usize, c: C64) -> Self {
        let mut out = Dense::zeros(k, d);
        if k > 0 {
            out.set(0, 0, 0, c);
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| *c == ZERO)
    }

    pub fn add_assign(&mut self, other: &Dense) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += *b;
        }
    }

    pub fn sub_assign(&mut self, other: &Dense) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a -= *b;
        }
    }

    pub fn scale(&mut self, c: C64) {
        for a in self.data.iter_mut() {
            *a *= c;
        }
    }

    pub fn scaled(&self, c: C64) -> Dense {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    /// Truncated product; with `cap = Some(w)` only terms with
    /// `m + n1 + n2 <= w` are produced.
    pub fn mul_capped(&self, other: &Dense, cap: Option<usize>) -> Dense {
        debug_assert_eq!(self.k, other.k);
        debug_assert_eq!(self.d(), other.d());
        let k = self.k;
        let d = self.d();
        let ny = self.ny();
        let lay = &self.layout;
        let mut out = Dense::zeros(k, d);
        for ma in 0..k {
            let row_a = &self.data[ma * ny..(ma + 1) * ny];
            for (ya, &ca) in row_a.iter().enumerate() {
                if ca == ZERO {
                    continue;
                }
                let sa = lay.degs[ya];
                let addrow = &lay.add[ya * ny..(ya + 1) * ny];
                for mb in 0..(k - ma) {
                    let mut smax = d - sa;
                    if let Some(w) = cap {
                        let used = ma + mb + sa;
                        if used > w {
                            break;
                        }
                        smax = smax.min(w - used);
                    }
                    let len = prefix_len(smax);
                    let row_b = &other.data[mb * ny..mb * ny + len];
                    let base = (ma + mb) * ny;
                    let out_row = &mut out.data[base..base + ny];
                    for (yb, &cb) in row_b.iter().enumerate() {
                        if cb != ZERO {
                            out_row[addrow[yb] as usize] += ca * cb;
                        }
                    }
                }
            }
        }
        out
    }

    pub fn mul(&self, other: &Dense) -> Dense {
        self.mul_capped(other, None)
    }

    /// Product with a series in `x` alone (`u[m]` is the coefficient of `x^m`).
    pub fn mul_x_series(&self, u: &[C64]) -> Dense {
        let k = self.k;
        let ny = self.ny();
        let mut out = Dense::zeros(k, self.d());
        for (mu, &cu) in u.iter().enumerate().take(k) {
            if cu == ZERO {
                continue;
            }
            for m in 0..(k - mu) {
                let src = &self.data[m * ny..(m + 1) * ny];
                let dst = &mut out.data[(m + mu) * ny..(m + mu + 1) * ny];
                for (o, s) in dst.iter_mut().zip(src) {
                    *o += cu * *s;
                }
            }
        }
        out
    }

    pub fn deriv_x(&self) -> Dense {
        let ny = self.ny();
        let mut out = Dense::zeros(self.k, self.d());
        for m in 1..self.k {
            let f = m as f64;
            for yi in 0..ny {
                out.data[(m - 1) * ny + yi] = self.data[m * ny + yi] * f;
            }
        }
        out
    }

    /// Partial derivative in `y_which` (1 or 2).
    pub fn deriv_y(&self, which: usize) -> Dense {
        let ny = self.ny();
        let lay = &self.layout;
        let mut out = Dense::zeros(self.k, self.d());
        for m in 0..self.k {
            for yi in 0..ny {
                let c = self.data[m * ny + yi];
                if c == ZERO {
                    continue;
                }
                let (n1, n2) = lay.exps[yi];
                let (p, t1, t2) = if which == 1 {
                    (n1, n1.wrapping_sub(1), n2)
                } else {
                    (n2, n1, n2.wrapping_sub(1))
                };
                if p == 0 {
                    continue;
                }
                out.data[m * ny + y_index(t1, t2)] += c * p as f64;
            }
        }
        out
    }

    /// Substitution `f(x, g1, g2)`, truncated. With a weight cap only terms
    /// of weight `m + n1 + n2 <= w` are kept (valid when `g1`, `g2` have no
    /// terms of weight zero).
    pub fn compose(&self, g1: &Dense, g2: &Dense, cap: Option<usize>) -> Dense {
        let k = self.k;
        let d = self.d();
        let ny = self.ny();
        let lay = self.layout.clone();
        // monomials actually present in f
        let mut present = vec![false; ny];
        for m in 0..k {
            for yi in 0..ny {
                if self.data[m * ny + yi] != ZERO {
                    present[yi] = true;
                }
            }
        }
        let mut max_deg = 0;
        for yi in 0..ny {
            if present[yi] {
                max_deg = max_deg.max(lay.degs[yi]);
            }
        }
        let needed = prefix_len(max_deg);
        let mut powers: Vec<Option<Dense>> = vec![None; needed];
        powers[0] = Some(Dense::constant(k, d, C64::new(1.0, 0.0)));
        for yi in 1..needed {
            let (n1, n2) = lay.exps[yi];
            let (prev, g) = if n1 > 0 {
                (y_index(n1 - 1, n2), g1)
            } else {
                (y_index(n1, n2 - 1), g2)
            };
            let p = powers[prev]
                .as_ref()
                .expect("graded order visits lower degrees first");
            powers[yi] = Some(p.mul_capped(g, cap));
        }
        let mut out = Dense::zeros(k, d);
        let mut coeffs = vec![ZERO; k];
        for yi in 0..needed {
            if !present[yi] {
                continue;
            }
            for (m, c) in coeffs.iter_mut().enumerate() {
                *c = self.data[m * ny + yi];
            }
            let term = powers[yi].as_ref().unwrap().mul_x_series(&coeffs);
            out.add_assign(&term);
        }
        if let Some(w) = cap {
            out.apply_cap(w);
        }
        out
    }

    pub fn apply_cap(&mut self, w: usize) {
        let ny = self.ny();
        for m in 0..self.k {
            for yi in 0..ny {
                if m + self.layout.degs[yi] > w {
                    self.data[m * ny + yi] = ZERO;
                }
            }
        }
    }

    /// `exp(t)` for a series with zero constant term.
    pub fn exp(&self) -> Dense {
        let k = self.k;
        let d = self.d();
        let mut out = Dense::constant(k, d, C64::new(1.0, 0.0));
        let mut term = out.clone();
        let max_weight = k + d;
        for j in 1..=max_weight {
            term = term.mul(self);
            term.scale(C64::new(1.0 / j as f64, 0.0));
            if term.is_zero() {
                break;
            }
            out.add_assign(&term);
        }
        out
    }
}
