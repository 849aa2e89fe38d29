//! The consolidated run report and its provenance helpers.

use std::fs;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use ml::Metrics;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::PipelineError;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Averaged histogram heights for one noise corpus: per bin, the mean and
/// population spread of the bin count across blocks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TipCurve {
    pub noise: String,
    pub bin_centers: Vec<f64>,
    pub tip_means: Vec<f64>,
    pub tip_stds: Vec<f64>,
}

/// Train and test scores for one classifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifierReport {
    pub classifier: String,
    pub train: Metrics,
    pub test: Metrics,
    /// False when the SVM stopped at its sweep budget and the partial model
    /// was used anyway.
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    /// The fully resolved configuration, defaults included.
    pub config: ExperimentConfig,
    /// SHA-256 of the serialized `config`; changes iff any field changes.
    pub config_sha256: String,
    pub master_seed: u64,
    pub started_unix_ms: u128,
    pub finished_unix_ms: u128,
    /// SHA-256 of the two corpus CSVs, in `noise_pair` order.
    pub corpus_sha256: (String, String),
    /// Explained-variance ratio of every principal component, descending.
    pub scree: Vec<f64>,
    pub histogram_tips: Vec<TipCurve>,
    /// One entry per configured classifier.
    pub classifiers: Vec<ClassifierReport>,
    pub warnings: Vec<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Hash of the resolved config's JSON serialization (stable field order).
pub fn config_sha256(config: &ExperimentConfig) -> Result<String, PipelineError> {
    let bytes = serde_json::to_vec(config).map_err(|e| PipelineError::Io {
        stage: "report",
        message: format!("serializing config: {e}"),
    })?;
    Ok(sha256_hex(&bytes))
}

pub fn file_sha256(path: &Path) -> Result<String, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::Io {
        stage: "report",
        message: format!("hashing {}: {e}", path.display()),
    })?;
    Ok(sha256_hex(&bytes))
}

pub fn unix_ms() -> u128 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .unwrap_or_default()
        .as_millis()
}

pub fn save_report(report: &RunReport, path: &Path) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| PipelineError::Io {
        stage: "report",
        message: format!("serializing report: {e}"),
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| PipelineError::Io {
        stage: "report",
        message: format!("writing {}: {e}", path.display()),
    })
}

pub fn load_report(path: &Path) -> Result<RunReport, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::Io {
        stage: "report",
        message: format!("reading {}: {e}", path.display()),
    })?;
    serde_json::from_str(&text).map_err(|e| PipelineError::Io {
        stage: "report",
        message: format!("parsing {}: {e}", path.display()),
    })
}
