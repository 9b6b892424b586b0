use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series variables differ: `{0}` vs `{1}`")]
    VariableMismatch(String, String),

    #[error("series division needs an invertible constant term; use Puiseux division")]
    NonInvertibleConstant,

    #[error("division by the zero series")]
    DivisionByZero,

    #[error("series reversion: {0}")]
    Reversion(String),

    #[error("table covers d = 1..={available}, but d = {requested} was requested")]
    TableTooShort { requested: usize, available: usize },

    #[error("cannot reach |error| <= {abs_err:e} at Re z = {re_z}: {reason}")]
    TailAccuracy {
        re_z: f64,
        abs_err: f64,
        reason: String,
    },

    #[error("event 2y - 3w = 27 not reached before t = {horizon}")]
    EventNotReached { horizon: f64 },

    #[error("step size underflow at t = {t}: h = {h:e}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("invalid local expansion: {0}")]
    LocalExpansion(String),

    #[error("x0 = {x0} lies outside the admissible bracket [{lo}, {hi}]")]
    OutOfBracket { x0: f64, lo: f64, hi: f64 },

    #[error("root solve failed: {0}")]
    RootSolve(String),

    #[error("sign check failed: {0}")]
    Sign(String),

    #[error("residual fit: {0}")]
    Fit(String),

    #[error("cache {path}: line {line}: {reason}")]
    Cache {
        path: PathBuf,
        line: usize,
        reason: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
