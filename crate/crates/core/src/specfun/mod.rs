//! Special functions for the explicit mode solutions: complex log-gamma,
//! Bessel functions of complex order and the biconfluent Heun function.

mod bessel;
pub mod dd;
mod gamma;
mod heun;

pub use bessel::{bessel_j, bessel_y};
pub use gamma::{gamma, log_gamma};
pub use heun::{heun_b, HeunRay, LocalExpansion};

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::integrate::IntegrateError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecFunError {
    #[error("log-gamma has a pole at z = {at}")]
    Pole { at: f64 },
    #[error("series did not converge after {terms} terms (relative tail {estimate:e})")]
    NoConvergence { terms: usize, estimate: f64 },
    #[error("Y_nu for nonzero integer order {order} is not supported")]
    IntegerOrderUnsupported { order: f64 },
    #[error("argument must be positive, got {x}")]
    NonPositiveArgument { x: f64 },
    #[error("argument is not finite")]
    NonFiniteArgument,
    #[error("tolerance must be positive")]
    BadTolerance,
    #[error("Heun continuation failed: {0}")]
    Continuation(IntegrateError),
}

/// Value and derivative of a special function with convergence diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult {
    pub value: Complex64,
    pub derivative: Complex64,
    pub terms_used: usize,
    /// Size of the neglected tail relative to the value.
    pub truncation_estimate: f64,
    /// Sum of term magnitudes over the magnitude of the sum.
    pub condition: f64,
}

impl SeriesResult {
    fn within(self, tol: f64) -> Result<Self, SpecFunError> {
        if self.truncation_estimate <= tol {
            Ok(self)
        } else {
            Err(SpecFunError::NoConvergence { terms: self.terms_used, estimate: self.truncation_estimate })
        }
    }
}
