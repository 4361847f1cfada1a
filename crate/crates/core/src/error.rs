use thiserror::Error;

use crate::contour::ValidityReport;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A contour specification failed its admissibility checks.
    #[error("invalid contour: {0}")]
    InvalidContour(ValidityReport),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("delta out of range: {0}")]
    DeltaOutOfRange(String),

    #[error("integrand not finite at {location}")]
    NonFiniteIntegrand { location: String },

    #[error("no decay on ray at angle {angle}")]
    NoDecay { angle: f64 },

    #[error("modulus too large for contour route: (|z|(1+eps))^rho = {exponent:.3} exceeds {limit:.3}")]
    Overflow { exponent: f64, limit: f64 },
}

impl Error {
    /// True for errors caused by rejected inputs rather than numerical failure.
    pub fn is_precondition(&self) -> bool {
        !matches!(self, Error::NonFiniteIntegrand { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
