use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid branch index {0}, expected 1 or 2")]
    InvalidBranch(u8),

    #[error("degenerate denominator Omega_{m}(E) = {value:e}")]
    DegenerateDenominator { m: usize, value: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("eigenvector {index} has parity expectation {value}, expected +-1")]
    MixedParity { index: usize, value: f64 },

    #[error("frequency grid spacing {spacing} is finer than the resolution {resolution} of the integration window")]
    UnderResolvedGrid { spacing: f64, resolution: f64 },

    #[error("frequency {frequency} exceeds the Nyquist limit {nyquist} of the sampling")]
    AboveNyquist { frequency: f64, nyquist: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether the error stems from the caller's input rather than from the
    /// numerics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter { .. }
                | Error::InvalidBranch(_)
                | Error::InvalidGrid(_)
                | Error::Config(_)
                | Error::UnderResolvedGrid { .. }
                | Error::AboveNyquist { .. }
        )
    }

    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }
}
