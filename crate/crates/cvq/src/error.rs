use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
///
/// Variants carry enough text to be surfaced verbatim by the command line
/// front end, which maps them all to exit code 2.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("unphysical covariance matrix: smallest symplectic eigenvalue {0} < 1")]
    Unphysical(f64),

    #[error("singular matrix in {0}")]
    Singular(&'static str),

    #[error("regularization required: symplectic eigenvalue {nu} is within {tol:e} of 1 while the state still depends on the parameter")]
    RegularizationRequired { nu: f64, tol: f64 },

    #[error("quantum Fisher information of `{0}` needs strictly positive signal and thermal photon numbers")]
    BoundaryQfi(&'static str),

    #[error("partially transposed spectrum is complex (discriminant {0:e})")]
    ComplexSpectrum(f64),

    #[error("photon subtraction annihilated the state (norm {0:e})")]
    ZeroNorm(f64),

    #[error("series did not converge: {0}")]
    NoConvergence(String),

    #[error("state is never entangled for these parameters: {0}")]
    NeverEntangled(String),

    #[error("finite-difference step too large: trace drift {0:e}")]
    StepTooLarge(f64),

    #[error("operator is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("singular parameter point: {0}")]
    SingularParameters(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
