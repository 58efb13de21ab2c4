use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("invalid dimension {got}: {reason}")]
    InvalidDimension { got: usize, reason: &'static str },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite input: {0}")]
    NonFiniteInput(String),

    #[error("point {point:?} is outside the interior of the domain")]
    OutOfDomain { point: Vec<f64> },

    #[error("non-finite result while evaluating {0}")]
    NonFiniteResult(&'static str),

    #[error("metric is not positive definite at {point:?}")]
    NotPositiveDefinite { point: Vec<f64> },

    #[error("conformal factor must be positive, got {0}")]
    NonPositiveFactor(f64),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("non-regular point: |grad u| = {grad_norm:e} is below {threshold:e}")]
    NonRegularPoint { grad_norm: f64, threshold: f64 },

    #[error("point is off the level set: |u - eps| = {0:e}")]
    OffLevel(f64),

    #[error("parameter {name} = {value:?} is out of range ({expected})")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("empty sampling domain: {0}")]
    EmptyDomain(String),

    #[error("barrier never touches: field is negative on the whole sampled domain (max {0:e})")]
    NoTouch(f64),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}
