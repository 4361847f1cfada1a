//! Reciprocal gamma and two-parameter Mittag-Leffler functions through
//! Hankel-type contour integrals.
//!
//! * [`gamma`]: `1/Γ(s)` over the rotated Hankel loop and its `λ`-scaled
//!   image, plus a Stirling-series oracle.
//! * [`ml`]: `E_{ρ,μ}(z)` by power series, the ζ-loop, and the Bateman and
//!   Dzhrbashyan loops.
//! * [`contour`] and [`quadrature`]: loop geometry, admissibility windows and
//!   the panel quadrature that integrates along them.

pub mod acceptance;
pub mod cli;
pub mod contour;
pub mod error;
pub mod gamma;
pub mod ml;
pub mod polar;
pub mod quadrature;
pub mod sum;

pub use error::{Error, Result};
pub use polar::PolarComplex;
