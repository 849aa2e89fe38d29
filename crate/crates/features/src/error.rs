use thiserror::Error;

#[derive(Debug, Error)]
pub enum FeatureError {
    #[error("cannot histogram an empty slice")]
    EmptyInput,

    #[error("block of {len} value(s) is too short for moment statistics")]
    BlockTooShort { len: usize },

    #[error("corpus {which} holds {available} values but blocking needs {required}")]
    InsufficientData {
        which: &'static str,
        required: usize,
        available: usize,
    },

    #[error("invalid histogram specification: {0}")]
    InvalidHistogram(String),

    #[error("invalid blocking configuration: {0}")]
    InvalidBlocking(String),

    #[error("invalid split fraction {0}; expected a value in (0, 1)")]
    InvalidFraction(f64),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("malformed dataset file: {0}")]
    Malformed(String),
}
