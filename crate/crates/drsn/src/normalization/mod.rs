//! Formal normalization of a diagonal doubly-resonant saddle-node up to a
//! prescribed order in x.

mod order;
mod stages;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::maps::ConjugacyMap;
use crate::saddle_node::{classify, Classification, SaddleNodeField};
use crate::series::{
    lie_derivative, lie_derivative_cutoff, ExactRegion, MultiSeries, PolyVectorField, UniSeries,
};

pub(crate) use order::decompose;
pub use order::{normalize_to_order, NormalFormData, OrderStage};
pub use stages::{
    center_manifold, diagonalize_linear_terms, linearize_x0, scalar_gauge,
    straighten_hypersurfaces, CenterManifold, GaugeStage, RiccatiStage, StraightenStage,
    StraighteningState, X0Linearization, X0Method,
};

/// Tolerance on the normal-form defect below the target order.
pub const EPS_PIPELINE: f64 = 1e-8;

/// Knobs for [`normalize_with`].
#[derive(Debug, Clone, Default)]
pub struct NormalizeOptions {
    /// Resonant part added to the flow time of the {x = 0} linearization.
    pub gamma_res: Option<UniSeries>,
}

/// Everything produced by the pipeline.
#[derive(Debug, Clone)]
pub struct Normalization {
    pub data: NormalFormData,
    /// Composite map at the working orders.
    pub map: ConjugacyMap,
    /// Normalized field at the working orders.
    pub field: SaddleNodeField,
    /// Input field at the working orders.
    pub input: SaddleNodeField,
    pub y_hat: (UniSeries, UniSeries),
    pub x0_method: X0Method,
    pub straightening: StraighteningState,
    pub d_history: Vec<UniSeries>,
    /// Requested orders `(N, K, D)`; work happens at y-degree `working_y_order`.
    pub order: usize,
    pub x_order: usize,
    pub y_order: usize,
    pub working_y_order: usize,
}

/// Result of [`verify_conjugacy`].
#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyResidual {
    #[serde(skip)]
    pub comp_y1: MultiSeries,
    #[serde(skip)]
    pub comp_y2: MultiSeries,
    pub region: ExactRegion,
    pub max_abs: f64,
}

impl ConjugacyResidual {
    /// Largest residual coefficient with x-degree below `n` and y-degree at
    /// most `y_max`, intersected with the exact region.
    pub fn max_below(&self, n: usize, y_max: usize) -> f64 {
        let r = self.region.restrict(n, y_max);
        self.comp_y1.max_abs_in(&r).max(self.comp_y2.max_abs_in(&r))
    }
}

/// `D phi . Y - Y_target o phi`, componentwise, with the region where the
/// truncated computation is exact.
pub fn verify_conjugacy(
    y: &PolyVectorField,
    map: &ConjugacyMap,
    target: &PolyVectorField,
) -> Result<ConjugacyResidual> {
    let l1 = lie_derivative(y, &map.comp_y1)?;
    let l2 = lie_derivative(y, &map.comp_y2)?;
    let t1 = map.pull(&target.comp_y1)?;
    let t2 = map.pull(&target.comp_y2)?;
    let comp_y1 = l1.checked_sub(&t1)?;
    let comp_y2 = l2.checked_sub(&t2)?;
    let region = lie_derivative_cutoff(y, &map.comp_y1)
        .intersect(&lie_derivative_cutoff(y, &map.comp_y2))
        .intersect(&target.comp_y1.compose_cutoff(&map.comp_y1, &map.comp_y2));
    let max_abs = comp_y1.max_abs_in(&region).max(comp_y2.max_abs_in(&region));
    Ok(ConjugacyResidual {
        comp_y1,
        comp_y2,
        region,
        max_abs,
    })
}

/// y-degree at which to work so that results are exact for `x^m`, `m < n`,
/// up to y-degree `y_order`, given the x-valuation `v` of the translation.
fn working_degree(y_order: usize, n: usize, v: usize) -> usize {
    if v == usize::MAX {
        return y_order;
    }
    // need v (D_w + 1 - d) >= n for d <= y_order
    let extra = n.div_ceil(v.max(1)).saturating_sub(1);
    y_order + extra
}

/// Run the whole pipeline with default options.
pub fn normalize(
    y: &SaddleNodeField,
    n: usize,
    x_order: usize,
    y_order: usize,
) -> Result<Normalization> {
    normalize_with(y, n, x_order, y_order, &NormalizeOptions::default())
}

/// Center manifold, {x = 0} linearization, diagonal linear part, constant
/// linear coefficients, straightened hypersurfaces and order-`n` steps.
pub fn normalize_with(
    y: &SaddleNodeField,
    n: usize,
    x_order: usize,
    y_order: usize,
    options: &NormalizeOptions,
) -> Result<Normalization> {
    if n == 0 {
        return Err(Error::Config(
            "normalization order must be at least 1".into(),
        ));
    }
    if y_order < 2 * n {
        return Err(Error::Config(format!(
            "y-degree {y_order} is below 2N = {}",
            2 * n
        )));
    }
    if n >= x_order {
        return Err(Error::Config(format!(
            "order {n} needs x-order above it, got {x_order}"
        )));
    }
    if classify(y) == Classification::Degenerate {
        return Err(Error::DegenerateResidue {
            order: 0,
            degree: 0,
            denominator: 0.0,
        });
    }
    let base = y.with_field(y.field.with_orders(x_order, y_order));
    let probe = center_manifold(&base)?;
    let v = probe.map.shift_valuation();
    let working_y_order = working_degree(y_order, n, v);
    let input = y.with_field(y.field.with_orders(x_order, working_y_order));
    let cm = if working_y_order == y_order {
        probe
    } else {
        center_manifold(&input)?
    };
    let cm_defect = cm
        .field
        .field
        .comp_y1
        .filter(|i| i.y_degree() == 0)
        .max_abs()
        .max(
            cm.field
                .field
                .comp_y2
                .filter(|i| i.y_degree() == 0)
                .max_abs(),
        );
    let x0 = linearize_x0(&cm.field, options.gamma_res.as_ref())?;
    let ric = diagonalize_linear_terms(&x0.field)?;
    let off_diag = ric
        .field
        .field
        .comp_y1
        .y_coefficient(0, 1)
        .max_abs()
        .max(ric.field.field.comp_y2.y_coefficient(1, 0).max_abs());
    let gauge = scalar_gauge(&ric.field, &ric.a_hat)?;
    let st = straighten_hypersurfaces(&gauge.field)?;
    let ord = normalize_to_order(&st.field, n)?;
    let mut map = cm.map.clone();
    for m in [&x0.map, &ric.map, &gauge.map, &st.map, &ord.map] {
        map = map.then(m)?;
    }
    let mut data = ord.data.clone();
    let mut remainders = vec![
        ("center-manifold".to_string(), cm_defect),
        ("riccati".to_string(), off_diag),
    ];
    remainders.append(&mut data.stage_remainders);
    data.stage_remainders = remainders;
    Ok(Normalization {
        data,
        map,
        field: ord.field,
        input,
        y_hat: cm.y_hat,
        x0_method: x0.method,
        straightening: st.state,
        d_history: ord.d_history,
        order: n,
        x_order,
        y_order,
        working_y_order,
    })
}

impl Normalization {
    /// Residual of the conjugacy between the input and the normal form.
    pub fn residual(&self) -> Result<ConjugacyResidual> {
        let target = self.data.field(self.x_order, self.working_y_order)?;
        verify_conjugacy(&self.input.field, &self.map, &target)
    }

    /// Largest residual coefficient below x-degree `N` and up to y-degree `D`.
    pub fn residual_max(&self) -> Result<f64> {
        let r = self.residual()?;
        if !r.region.covers(self.order, self.y_order) {
            return Err(Error::Invariant(
                "exact region does not cover the requested orders".into(),
            ));
        }
        Ok(r.max_below(self.order, self.y_order))
    }

    /// The composite map truncated to the requested y-degree.
    pub fn map_at_requested_order(&self) -> ConjugacyMap {
        self.map.with_orders(self.x_order, self.y_order)
    }
}
