//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A Cholesky pivot fell at or below the positivity threshold.
    #[error("matrix is not positive definite: pivot {pivot:.3e} at index {index} (threshold {threshold:.3e})")]
    NotPositiveDefinite {
        pivot: f64,
        index: usize,
        threshold: f64,
    },

    /// The extremal eigenvalue iteration did not reach the requested tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual:.3e}, tol {tol:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        tol: f64,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Point outside the circle parameterization (-pi, pi].
    #[error("theta {0} outside (-pi, pi]")]
    DomainError(f64),

    /// The adaptive quadrature could not certify the requested tolerance,
    /// or the weight is not integrable.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// Requested analytic quantity is not available for this weight family.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("invalid weight specification: {0}")]
    InvalidWeight(String),

    /// Fourier table too short for the requested Gram block.
    #[error("insufficient Fourier coefficients: need index {needed}, table holds {have}")]
    InsufficientCoefficients { needed: i64, have: i64 },

    /// x* G x came out negative beyond tolerance: the Gram matrix is broken.
    #[error("negative quadratic form: {0:.3e}")]
    NegativeQuadraticForm(f64),

    /// Certificate search terminated with ratio >= 1; the degree or grid is
    /// too small to conclude anything.
    #[error("certificate search diverged: final ratio {0:.6}")]
    SearchDiverged(f64),

    /// Multiplier sequence violates the fast-decay condition.
    #[error("sequence is not a fast monotone multiplier: tail ratio {ratio:.4} exceeds {threshold}")]
    NotFast { ratio: f64, threshold: f64 },

    /// Grid ratio between two weights exceeded the equivalence cap.
    #[error("weights are not equivalent: grid ratio {ratio:.3e} exceeds cap {cap:.3e}")]
    NotEquivalent { ratio: f64, cap: f64 },

    #[error("certificate verification failed: {0}")]
    VerificationFailed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// A mathematical invariant of the construction failed numerically;
    /// indicates a bug or severe ill-conditioning, not a user error.
    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status for the CLI: 2 for configuration rejection,
    /// 1 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig(_) | Error::InvalidWeight(_) => 2,
            _ => 1,
        }
    }
}
