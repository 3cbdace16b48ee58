use core::fmt;

use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every evaluator and experiment in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// The argument sits inside the guard band of a pole.
    Pole { at: Complex64 },
    /// An argument lies outside the domain of the operation.
    Domain(&'static str),
    /// The direct series would need more terms than the configured cap.
    NonConvergence { terms_needed: f64, cap: u64 },
    /// Panel refinement could not reach the requested tolerance.
    QuadratureFailure { panels: usize },
    /// The grid spacing does not divide the unit translation.
    GridMismatch(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Pole { at } => write!(f, "argument {at} is inside a pole guard band"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::NonConvergence { terms_needed, cap } => write!(
                f,
                "series needs about {terms_needed:.3e} terms, more than the cap of {cap}"
            ),
            Error::QuadratureFailure { panels } => {
                write!(f, "quadrature did not converge after {panels} panels")
            }
            Error::GridMismatch(msg) => write!(f, "grid mismatch: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
