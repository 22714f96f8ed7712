use thiserror::Error;

/// Errors produced by the linear-algebra kernel and the parametrization layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (relative deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("matrix is not skew-Hermitian (relative deviation {deviation:e})")]
    NotSkewHermitian { deviation: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eig:e})")]
    NotPsd { min_eig: f64 },

    #[error("matrix is not unitary (residual {residual:e})")]
    NotUnitary { residual: f64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("eigendecomposition failed to converge")]
    ConvergenceFailure,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid probability vector: {0}")]
    InvalidSimplex(String),

    #[error(
        "matrix angle is singular (smallest eigenvalue {min_eig:e}); use the exponential path"
    )]
    SingularAngle { min_eig: f64 },

    #[error("angle {value} outside the admissible range [0, pi/2]")]
    AngleOutOfRange { value: f64 },

    #[error("parameter {name} = {value} outside [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("trace normalization violated (trace {trace})")]
    BadNormalization { trace: f64 },

    #[error("state carries no (n, m) factorization")]
    MissingFactorization,

    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),

    #[error("condition {condition} violated (residual {residual:e})")]
    ConditionViolated {
        condition: &'static str,
        residual: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
