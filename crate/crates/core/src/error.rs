use thiserror::Error;

/// Errors produced by the simulation and analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid value for `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid site pair ({a}, {b}): {reason}")]
    InvalidSites {
        a: usize,
        b: usize,
        reason: &'static str,
    },

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error(
        "drift matrix is close to defective (eigenvector condition number {condition:.3e}); \
         fall back to the RK4 integrator"
    )]
    IllConditioned { condition: f64 },

    #[error("Lyapunov system is singular")]
    SingularLyapunov,

    #[error("step size {dt} exceeds the stable maximum {max} for this system")]
    StepTooLarge { dt: f64, max: f64 },

    #[error("correlation matrix left the physical range at t = {time}: spectrum in [{min:.3e}, {max:.3e}]")]
    Unphysical { time: f64, min: f64, max: f64 },

    #[error("reconstructed two-site state is not positive (smallest eigenvalue {0:.3e})")]
    NotPositive(f64),

    #[error("matrix is not antisymmetric (max |A + Aᵀ| = {0:.3e})")]
    NotAntisymmetric(f64),

    #[error("two-site state is not of X form (max forbidden entry {0:.3e})")]
    NotXState(f64),

    #[error("fit failed: {0}")]
    Fit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(key: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key,
            reason: reason.into(),
        }
    }

    /// Numerical failures, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::EigenFailure
                | Error::IllConditioned { .. }
                | Error::SingularLyapunov
                | Error::Unphysical { .. }
                | Error::NotPositive(_)
                | Error::Fit(_)
        )
    }
}
