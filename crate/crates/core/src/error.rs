use thiserror::Error;

/// Errors raised by weight generation, operator assembly, solvers and diagnostics.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular evaluation: {0}")]
    SingularEvaluation(String),

    #[error("adaptive quadrature exceeded depth {depth} (error estimate {estimate:e}, target {target:e})")]
    QuadratureNonConvergence {
        depth: usize,
        estimate: f64,
        target: f64,
    },

    #[error("weight table too short: need at least {needed} weights, have {have}")]
    ShortWeightTable { needed: usize, have: usize },

    #[error("system matrix is singular")]
    SingularMatrix,

    #[error("numerical blowup at time step {step} (max |U| = {max_abs:e})")]
    Blowup { step: usize, max_abs: f64 },

    #[error("nonzero boundary trace {value:e} at t = {time} where the problem requires a homogeneous boundary")]
    NonzeroTrace { time: f64, value: f64 },

    #[error("H+ splitting requires w_3 < 0, found w_3 = {w3:e}")]
    RegimeMismatch { w3: f64 },

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
