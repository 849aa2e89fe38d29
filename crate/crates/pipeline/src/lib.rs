//! End-to-end orchestration for the QBER noise classifier: corpus
//! simulation, feature extraction, PCA + classifier training, held-out
//! evaluation, and the consolidated run report.
//!
//! Every stage exchanges data through files in one artifact directory, so
//! stages can be re-run independently and runs are reproducible from the
//! configuration plus the master seed alone.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

pub use commands::{
    artifact, cmd_evaluate, cmd_featurize, cmd_pipeline, cmd_simulate, cmd_train, EvalOutcome,
    FeaturizeOutcome, MetricsEntry, TrainOutcome, TrainedClassifier, GRID_STEPS,
};
pub use config::{
    ClassifierKind, ConfigOverrides, ExperimentConfig, KernelChoice, Scenario, DEFAULT_MASTER_SEED,
};
pub use error::PipelineError;
pub use report::{
    config_sha256, file_sha256, load_report, save_report, sha256_hex, unix_ms, ClassifierReport,
    RunReport, TipCurve, REPORT_SCHEMA_VERSION,
};
