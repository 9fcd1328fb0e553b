use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Crate-wide error type. Variants mirror the failure modes of the
/// expression DSL, the pointwise geometry, the integrators and the
/// verification probes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at byte {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("unknown identifier `{0}` (coordinates are x1, x2, x3)")]
    UnknownIdentifier(String),

    #[error("function `{name}` takes exactly one argument")]
    Arity { name: String },

    #[error("domain error in `{op}`: {reason} (subexpression `{subexpr}`)")]
    Domain {
        op: String,
        reason: String,
        subexpr: String,
    },

    #[error("requested derivative order {0} exceeds the supported maximum {max}", max = crate::num::MAX_JET_ORDER)]
    OrderTooHigh(usize),

    #[error("unknown builtin metric `{0}`")]
    UnknownBuiltin(String),

    #[error("builtin metric `{builtin}` is missing parameter `{param}`")]
    MissingParam { builtin: String, param: String },

    #[error("metric degenerate at {point:?}: {reason}")]
    DegenerateMetric { point: [f64; 3], reason: String },

    #[error("null or near-null velocity: g(u,u) = {norm2}")]
    NullVelocity { norm2: f64 },

    #[error("constraint violated: {which} = {value} (tolerance {tol})")]
    ConstraintViolated {
        which: String,
        value: f64,
        tol: f64,
    },

    #[error("negative Gram determinant {0} for the (u,a) pair")]
    NegativeGram(f64),

    #[error("degenerate curve point: area {area} below threshold {threshold}")]
    DegenerateCurve { area: f64, threshold: f64 },

    #[error("chart singularity: {0}")]
    ChartSingularity(String),

    #[error("conformally degenerate curve point: kappa_s^2 + kappa^2 tau^2 = {0}")]
    ConformalDegenerate(f64),

    #[error("projection degenerate: {0}")]
    ProjectionDegenerate(String),

    #[error("velocity not unit-speed: g(u,u) = {0}")]
    NotUnitSpeed(f64),

    #[error("reparametrization map not strictly increasing: h'({t}) = {slope}")]
    NonMonotone { t: f64, slope: f64 },

    #[error("integration step underflow at t = {t} (step {step})")]
    StepFailure { t: f64, step: f64 },

    #[error("constraint drift {drift} exceeded {tol} at t = {t} with projection off")]
    ConstraintDrift { t: f64, drift: f64, tol: f64 },

    #[error("discrete curve too short: {nodes} nodes, need at least {required}")]
    StencilTooShort { nodes: usize, required: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code class: 2 for input problems, 3 for numerical
    /// aborts (verification failures are handled separately as 1).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnknownIdentifier(_)
            | Error::Arity { .. }
            | Error::OrderTooHigh(_)
            | Error::UnknownBuiltin(_)
            | Error::MissingParam { .. }
            | Error::Config(_)
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
