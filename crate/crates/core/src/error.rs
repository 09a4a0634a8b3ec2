use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("CFL violation: dt = {dt} exceeds limit {limit} (cfl_factor * min(dx) / c)")]
    CflViolation { dt: f64, limit: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("{what} index {index} out of range")]
    IndexOutOfRange { what: &'static str, index: usize },

    #[error("expected a {expected}-component field, got {got}")]
    ComponentCount { expected: usize, got: usize },

    #[error("numerical instability at x0 = {x0}: max |psi| grew by a factor {growth} in one step")]
    NumericalInstability { x0: f64, growth: f64 },

    #[error("non-finite value produced at x0 = {x0}")]
    NonFinite { x0: f64 },

    #[error("need at least {needed} time levels, got {got}")]
    InsufficientLevels { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("snapshot format: {0}")]
    Snapshot(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
