use thiserror::Error;

/// Errors raised anywhere in the matrix-function pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FunmError {
    #[error("dimension mismatch in {op}: {detail}")]
    DimensionMismatch { op: &'static str, detail: String },

    #[error("matrix is singular to working precision (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter {name}: {detail}")]
    InvalidParameter { name: &'static str, detail: String },

    #[error("zero denominator between nodes {left} and {right}; coincident nodes must go through the Taylor path")]
    ZeroDenominator { left: usize, right: usize },

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("partition does not match the eigenvalue list: {0}")]
    PartitionMismatch(String),

    #[error("Taylor coefficient of order {order} unavailable: {reason}")]
    CoefficientUnavailable { order: usize, reason: String },

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("cluster-center sampling exhausted after {attempts} rejected sequences")]
    GenerationExhausted { attempts: usize },

    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: Box<FunmError>,
    },

    #[error("zero reference norm in relative error")]
    ZeroReference,
}

impl FunmError {
    pub(crate) fn dims(op: &'static str, detail: impl Into<String>) -> Self {
        FunmError::DimensionMismatch {
            op,
            detail: detail.into(),
        }
    }

    /// True for failures of the numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        match self {
            FunmError::SingularMatrix { .. }
            | FunmError::ZeroDenominator { .. }
            | FunmError::NonFinite(_)
            | FunmError::GenerationExhausted { .. }
            | FunmError::ZeroReference => true,
            FunmError::Trial { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, FunmError>;
