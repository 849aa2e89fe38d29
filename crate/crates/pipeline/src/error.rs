//! Error classes for the experiment driver, each mapped to a process exit
//! code: validation problems exit 2, runtime/convergence failures exit 3,
//! and I/O trouble exits 4.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    /// The configuration (file or resolved values) is unusable; the message
    /// lists every offending field.
    #[error("invalid configuration: {0}")]
    Validation(String),

    /// A stage failed while computing (simulation, training, evaluation).
    #[error("[{stage}] {message}")]
    Runtime { stage: &'static str, message: String },

    /// Reading or writing an artifact failed, or an artifact is malformed.
    #[error("[{stage}] i/o: {message}")]
    Io { stage: &'static str, message: String },
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Validation(_) => 2,
            PipelineError::Runtime { .. } => 3,
            PipelineError::Io { .. } => 4,
        }
    }

    pub(crate) fn runtime(stage: &'static str, message: impl Into<String>) -> Self {
        PipelineError::Runtime {
            stage,
            message: message.into(),
        }
    }

    pub(crate) fn io(stage: &'static str, message: impl Into<String>) -> Self {
        PipelineError::Io {
            stage,
            message: message.into(),
        }
    }
}

/// Classifies a simulation-layer error under the stage that hit it.
pub(crate) fn from_qkd(stage: &'static str, e: qkd::QkdError) -> PipelineError {
    use qkd::QkdError;
    match e {
        QkdError::InvalidConfig(message) => PipelineError::Validation(message),
        QkdError::Quantum(inner) => PipelineError::runtime(stage, inner.to_string()),
        QkdError::Io(_) | QkdError::Csv(_) | QkdError::Json(_) | QkdError::Malformed(_) => {
            PipelineError::io(stage, e.to_string())
        }
    }
}

/// Classifies a feature-extraction error. Sizing problems mean the config
/// does not fit the data, so they count as validation.
pub(crate) fn from_features(stage: &'static str, e: features::FeatureError) -> PipelineError {
    use features::FeatureError;
    match e {
        FeatureError::Io(_) | FeatureError::Csv(_) | FeatureError::Malformed(_) => {
            PipelineError::io(stage, e.to_string())
        }
        FeatureError::EmptyInput
        | FeatureError::BlockTooShort { .. }
        | FeatureError::InsufficientData { .. }
        | FeatureError::InvalidHistogram(_)
        | FeatureError::InvalidBlocking(_)
        | FeatureError::InvalidFraction(_) => PipelineError::Validation(e.to_string()),
    }
}

/// Classifies a learning-layer error. Non-convergence lands here only when
/// the caller treats it as fatal.
pub(crate) fn from_ml(stage: &'static str, e: ml::MlError) -> PipelineError {
    use ml::MlError;
    match e {
        MlError::Io(_) | MlError::Json(_) | MlError::SchemaMismatch { .. } => {
            PipelineError::io(stage, e.to_string())
        }
        other => PipelineError::runtime(stage, other.to_string()),
    }
}
