use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("invalid time grid: {0}")]
    InvalidGrid(String),

    #[error("{what} requires the exponential regime (b = 0), got b = {b}")]
    RequiresExponential { what: &'static str, b: f64 },

    #[error("series for {what} did not converge within {terms} terms")]
    SeriesNotConverged { what: &'static str, terms: usize },

    #[error("{what} overflowed double precision")]
    Overflow { what: &'static str },

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("Laplace inversion unstable at t = {t}: {value} vs {check} with fewer nodes")]
    InversionUnstable { t: f64, value: f64, check: f64 },

    #[error("empty sample")]
    EmptySample,

    #[error("cannot allocate {0}")]
    ResourceExhausted(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::InvalidParameter {
            name,
            value,
            reason,
        }
    }

    /// Numerical failures as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SeriesNotConverged { .. }
                | Error::Overflow { .. }
                | Error::Quadrature(_)
                | Error::InversionUnstable { .. }
                | Error::ResourceExhausted(_)
        )
    }
}
