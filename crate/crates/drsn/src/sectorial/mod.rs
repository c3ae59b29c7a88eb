//! Analytic normalization on sectors bisected by `i lambda` and `-i lambda`.
//!
//! A field prepared at order `N + 2` is integrated along the rescaled
//! Cauchy problem `dX/dt = (+/-) i Z / (1 + b X + C)`, whose trajectories
//! stay in the stable domain `Omega` and tend to the origin. Homological
//! equations `L_Y(alpha) = x^{M+1} A` are solved by integrating along these
//! asymptotic paths, which yields the radial map `phi`, the tangential map
//! `psi` and the sectorial normalization `Psi = psi o phi`.

mod dopri;
mod field;
mod flatness;
mod flow;
mod geometry;
mod maps;
mod path;

pub use field::{FieldValues, SectorialField};
pub use flatness::{fit_flatness, transition_flatness, FlatnessReport};
pub use flow::{integrate_flow, replay_flow, FlowOptions, Trajectory};
pub use geometry::{
    critical_time_bound, domain_membership, GeometryOverrides, Membership, SectorGeometry,
    SectorSign,
};
pub use maps::{
    build_sectorial_maps, build_sectorial_maps_shrinking, cauchy_coefficient, torus_nodes, MapKind,
    MapTimes, SectorialMap, SectorialMaps, Smallness, SMALLNESS_BOUND,
};
pub use path::{
    homological_path_integral, homological_path_integral_on_grid, homological_residual,
    lie_derivative_fd, PathIntegral, PathOptions, PathPoint,
};
