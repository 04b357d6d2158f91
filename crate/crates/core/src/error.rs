use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChnsError {
    #[error("grid is invalid: {0}")]
    InvalidGrid(String),
    #[error("field shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("wall-normal velocity must vanish on both walls (max |u_y| on wall rows = {0:e})")]
    WallNormalNonzero(f64),
    #[error("incompatible right-hand side: mean {mean:e} exceeds tolerance {tol:e}")]
    IncompatibleRhs { mean: f64, tol: f64 },
    #[error("viscosity must be positive everywhere (min = {0:e})")]
    NonpositiveViscosity(f64),
    #[error("spectral cutoff out of range: {0}")]
    CutoffOutOfRange(String),
    #[error("assumption {item} violated: {detail}")]
    AssumptionViolated { item: String, detail: String },
    #[error("sample range too small: [{lo}, {hi}] must cover [-3, 3]")]
    RangeTooSmall { lo: f64, hi: f64 },
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("boundary family has no closed-form decay tails: {0}")]
    UnsupportedFamily(String),
    #[error("solver diverged: {0}")]
    SolverDiverged(String),
    #[error("CFL violation: dt = {dt:e} exceeds limit {limit:e} ({reason})")]
    CflViolation { dt: f64, limit: f64, reason: String },
    #[error("mode mismatch: {0}")]
    ModeMismatch(String),
    #[error("misaligned series: {0}")]
    Misaligned(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, ChnsError>;
