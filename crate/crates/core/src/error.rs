use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Failures raised by the numerical core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("symmetric eigendecomposition did not converge")]
    EigenNoConvergence,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("class {label} has {size} members, at least {required} required")]
    InsufficientClassSize {
        label: usize,
        size: usize,
        required: usize,
    },

    #[error("estimated covariance of class {0} is singular")]
    SingularCovariance(usize),

    #[error("at least two non-empty classes are required")]
    SingleClass,

    #[error("class {0} has no members")]
    EmptyClass(usize),

    #[error("scatter identity T = B + W violated (relative residual {0:e})")]
    ScatterIdentity(f64),

    #[error("total scatter matrix is singular (condition ratio {0:e})")]
    SingularTotalScatter(f64),

    #[error("generalized eigenproblem residual check failed (relative residual {0:e})")]
    ResidualCheck(f64),

    #[error("component means coincide, separator undefined")]
    EqualMeans,

    #[error("linear separator did not converge after {0} iterations")]
    NoConvergence(usize),

    #[error("direction is degenerate under the given matrix")]
    ZeroDirection,

    #[error("label {0} not present in dataset")]
    MissingLabel(usize),

    #[error("quadrature supports dimension 1 or 2, got {0}")]
    DimensionTooHigh(usize),
}
