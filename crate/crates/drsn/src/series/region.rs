use serde::Serialize;

/// Set of indices `(m, d)` (x-power, total y-degree) where a truncated
/// computation is known to agree with the untruncated one. It is
/// downward closed: `bounds[d]` is the exclusive limit on `m` at degree `d`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactRegion {
    bounds: Vec<usize>,
}

impl ExactRegion {
    /// The whole truncation box.
    pub fn full(x_order: usize, y_order: usize) -> Self {
        ExactRegion {
            bounds: vec![x_order; y_order + 1],
        }
    }

    /// Region left exact by substituting `y -> y + s(x) + ...` where the
    /// y-constant part `s` has x-valuation `v`: dropped terms of degree
    /// `D + 1` reach degree `d` only with a factor `x^(v (D + 1 - d))`.
    pub fn after_shift(x_order: usize, y_order: usize, v: usize) -> Self {
        let bounds = (0..=y_order)
            .map(|d| v.saturating_mul(y_order + 1 - d).min(x_order))
            .collect();
        ExactRegion { bounds }
    }

    /// Region left exact by a Lie derivative along a field whose y-constant
    /// part has x-valuation `v`: only the top degree is affected.
    pub fn after_lie_derivative(x_order: usize, y_order: usize, v: usize) -> Self {
        let mut r = ExactRegion::full(x_order, y_order);
        r.bounds[y_order] = v.min(x_order);
        r
    }

    /// Region where first y-derivatives of a series exact on `self` are
    /// exact: degree `d` needs degree `d + 1`.
    pub fn after_y_derivative(&self) -> Self {
        let n = self.bounds.len();
        ExactRegion {
            bounds: (0..n.saturating_sub(1))
                .map(|d| self.bounds[d].min(self.bounds[d + 1]))
                .collect(),
        }
    }

    pub fn contains(&self, m: usize, d: usize) -> bool {
        d < self.bounds.len() && m < self.bounds[d]
    }

    pub fn bound(&self, d: usize) -> usize {
        self.bounds.get(d).copied().unwrap_or(0)
    }

    pub fn intersect(&self, other: &ExactRegion) -> ExactRegion {
        let len = self.bounds.len().min(other.bounds.len());
        ExactRegion {
            bounds: (0..len)
                .map(|d| self.bounds[d].min(other.bounds[d]))
                .collect(),
        }
    }

    /// Restrict to `m < n` and `d <= y_max`.
    pub fn restrict(&self, n: usize, y_max: usize) -> ExactRegion {
        ExactRegion {
            bounds: self
                .bounds
                .iter()
                .take(y_max + 1)
                .map(|b| (*b).min(n))
                .collect(),
        }
    }

    /// Whether the box `m < n`, `d <= y_max` lies inside the region.
    pub fn covers(&self, n: usize, y_max: usize) -> bool {
        (0..=y_max).all(|d| self.bound(d) >= n)
    }
}
