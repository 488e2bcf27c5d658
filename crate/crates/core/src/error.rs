use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} is {left_shape:?} but {right} is {right_shape:?}")]
    DimensionMismatch {
        left: &'static str,
        left_shape: (usize, usize),
        right: &'static str,
        right_shape: (usize, usize),
    },

    #[error("empty input: {0} must have at least one row and one column")]
    Empty(&'static str),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("regularization weight must be finite and non-negative, got {0}")]
    InvalidLambda(f64),

    #[error(
        "dual objective unavailable: Gram matrix is singular or ill-conditioned \
         (smallest pivot {pivot:e}, threshold {threshold:e})"
    )]
    DualUnavailable { pivot: f64, threshold: f64 },

    #[error("sign-pattern oracle supports at most {max} columns, instance has {found}")]
    OracleTooLarge { max: usize, found: usize },

    #[error(
        "sign-pattern oracle inconclusive: no sign pattern satisfied the optimality conditions"
    )]
    OracleInconclusive,

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid experiment spec: {0}")]
    InvalidSpec(String),

    #[error("malformed matrix file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
