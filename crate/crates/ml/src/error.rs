use thiserror::Error;

use crate::svm::SvmModel;

#[derive(Debug, Error)]
pub enum MlError {
    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("data contains a non-finite value")]
    NonFinite,

    #[error("binary classifier received label {0}; expected 0 or 1")]
    InvalidLabel(u8),

    #[error("training data holds a single class; need both")]
    SingleClass,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// The SMO solver ran out of its sweep budget. The partially trained
    /// model is attached so callers can inspect or salvage it.
    #[error("smo did not converge within {sweeps} sweeps")]
    NonConvergence { sweeps: usize, model: Box<SvmModel> },

    #[error("model file schema {found} is not the supported {expected}")]
    SchemaMismatch { expected: u32, found: u32 },

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("model serialization failure: {0}")]
    Json(#[from] serde_json::Error),
}
