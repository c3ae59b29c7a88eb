use thiserror::Error;

/// Errors raised by the series engine, the normalization pipeline, the
/// Borel–Laplace tools and the sectorial integrator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("truncation orders differ: ({0}, {1}) versus ({2}, {3})")]
    OrderMismatch(usize, usize, usize, usize),

    #[error("substitution requires components without constant term (found {0})")]
    SubstitutionDomain(String),

    #[error("flow time must have zero constant term (found {0})")]
    FlowTime(String),

    #[error("not a doubly-resonant saddle-node: {0}")]
    NotASaddleNode(String),

    #[error("restriction to x = 0 is not div-integrable at y-degree {degree} (obstruction {obstruction:.3e})")]
    NotDivIntegrable { degree: usize, obstruction: f64 },

    #[error(
        "degenerate residue: denominator {denominator:.3e} at x-order {order}, v-degree {degree}"
    )]
    DegenerateResidue {
        order: usize,
        degree: usize,
        denominator: f64,
    },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("Borel kind mismatch: {0}")]
    KindMismatch(String),

    #[error("singular Padé system at order ({0}, {1})")]
    SingularPade(usize, usize),

    #[error("Padé continuation has a pole at {pole} inside the sampled domain")]
    ContinuationFailure { pole: String },

    #[error("Laplace ray at angle {theta} passes within {distance:.2e} of a pole")]
    DirectionBlocked { theta: f64, distance: f64 },

    #[error("Laplace integral does not converge: {0}")]
    DivergentIntegral(String),

    #[error("singular operator: {0}")]
    SingularOperator(String),

    #[error("resonant denominator at index {0}")]
    Resonance(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("trajectory left the stable domain at t = {t}: {state}")]
    StabilityViolation { t: f64, state: String },

    #[error("step size underflow at t = {0}")]
    Stiffness(f64),

    #[error("step budget exhausted: {0}")]
    Budget(String),

    #[error(
        "smallness criterion fails (exp(2 sup|f|) = {measured:.4}); try r <= {suggested_r:.4e}"
    )]
    ShrinkDomain { measured: f64, suggested_r: f64 },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("unexpected input shape: {0}")]
    Shape(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
