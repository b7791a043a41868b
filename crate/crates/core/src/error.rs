use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the domain of {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("quadrature did not converge: value {value:e}, error estimate {err_est:e}")]
    NotConverged { value: f64, err_est: f64 },

    #[error("contour truncation error estimate {estimate:e} exceeds tolerance {tolerance:e}")]
    Truncation { estimate: f64, tolerance: f64 },

    #[error("non-finite value encountered in {0}")]
    NonFinite(&'static str),

    #[error("oscillatory envelope does not decay")]
    EnvelopeNotDecaying,

    #[error("symmetry violation: max |phi(tau) - phi(-tau)| = {deviation:e}")]
    Symmetry { deviation: f64 },

    #[error("cost guard: {requested} kernel evaluations exceed the limit {limit}")]
    CostGuard { requested: usize, limit: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(op: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics themselves, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. }
                | Error::Truncation { .. }
                | Error::NonFinite(_)
                | Error::EnvelopeNotDecaying
                | Error::CostGuard { .. }
        )
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}
