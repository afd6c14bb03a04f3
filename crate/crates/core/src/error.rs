use thiserror::Error;

/// Errors raised by the spectral toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("backend mismatch: {0}")]
    BackendMismatch(String),

    #[error("spectrum is not Hermitian-symmetric: {0}")]
    NonHermitian(String),

    #[error("invalid frequency: {0}")]
    InvalidFrequency(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the zero spectrum has no frequency measure")]
    ZeroSpectrum,

    #[error(
        "Neumann iteration diverged after {iterations} iterations \
         (last residual {residual:e}, contraction bound q = {q})"
    )]
    Divergence {
        iterations: usize,
        residual: f64,
        q: f64,
        history: Vec<f64>,
    },

    #[error(
        "iterate carries {count} atoms, above the limit of {limit}; \
         raise weightFloor or maxUnknowns"
    )]
    UnknownExplosion { count: usize, limit: usize },

    #[error("truncated system has {unknowns} unknowns, above the limit of {limit}")]
    SystemTooLarge { unknowns: usize, limit: usize },

    #[error("truncated system is numerically singular (condition estimate {condition:e})")]
    NearSingular { condition: f64 },

    #[error("report is not converged (residual {residual:e} > tol {tol:e})")]
    Unconverged { residual: f64, tol: f64 },

    #[error("{0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
