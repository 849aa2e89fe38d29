//! Experiment configuration.
//!
//! Config files are sparse JSON: only `scenario` is required, everything
//! else falls back to scenario-dependent defaults. Resolution produces a
//! fully explicit [`ExperimentConfig`] that is embedded verbatim in the run
//! report, so every defaulted parameter is visible in provenance.

use std::fs;
use std::path::Path;

use features::{BlockingConfig, HistogramSpec, FEATURE_COUNT};
use ml::PcaTarget;
use qkd::rng::derive_seed;
use qkd::{NoiseKind, NoisePlacement, NoiseStrength, Protocol, SessionConfig};
use serde::{Deserialize, Serialize};

use crate::error::PipelineError;

/// Used when neither the config file nor the CLI provides a master seed.
pub const DEFAULT_MASTER_SEED: u64 = 7;

/// Sub-seed tags: every stage that needs randomness derives its own seed
/// from the master seed, so stages stay independent and reorderable.
const SEED_TAG_CORPUS_A: u64 = 1;
const SEED_TAG_CORPUS_B: u64 = 2;
const SEED_TAG_SHUFFLE: u64 = 3;
const SEED_TAG_SPLIT: u64 = 4;

/// Which experiment family to run; fixes the noise placement and most
/// defaults.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Noise strikes each qubit once in transit; strengths span the full
    /// `[0, 1]` range by default.
    ChannelRemote,
    /// Noise follows every gate, device-style; strengths stay small.
    GateBased,
}

impl Scenario {
    pub fn label(&self) -> &'static str {
        match self {
            Scenario::ChannelRemote => "channel_remote",
            Scenario::GateBased => "gate_based",
        }
    }

    /// The noise kinds this scenario is normally paired with; other pairs
    /// run, but with a warning.
    fn usual_noises(&self) -> [NoiseKind; 2] {
        match self {
            Scenario::ChannelRemote => [NoiseKind::AmplitudeDamping, NoiseKind::BitFlip],
            Scenario::GateBased => [NoiseKind::BitFlip, NoiseKind::Depolarizing],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Knn,
    Gnb,
    Svm,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 3] =
        [ClassifierKind::Knn, ClassifierKind::Gnb, ClassifierKind::Svm];

    pub fn label(&self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Gnb => "gnb",
            ClassifierKind::Svm => "svm",
        }
    }
}

/// SVM kernel choice. Widths left as `null` are resolved from the training
/// data (`1 / (dims * variance)`); the fitted model records the final value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KernelChoice {
    Linear,
    Rbf {
        #[serde(default)]
        gamma: Option<f64>,
    },
    Poly {
        degree: u32,
        #[serde(default)]
        gamma: Option<f64>,
        /// Additive offset; defaults to 1.
        #[serde(default)]
        coef0: Option<f64>,
    },
}

/// The sparse on-disk form: unknown keys are rejected so typos cannot
/// silently fall back to defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigOverrides {
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub protocol: Option<Protocol>,
    #[serde(default)]
    pub noise_pair: Option<(NoiseKind, NoiseKind)>,
    #[serde(default)]
    pub sessions_per_noise: Option<usize>,
    #[serde(default)]
    pub key_length: Option<usize>,
    #[serde(default)]
    pub p_max: Option<f64>,
    #[serde(default)]
    pub block_count: Option<usize>,
    #[serde(default)]
    pub block_size: Option<usize>,
    #[serde(default)]
    pub shuffle_rounds: Option<usize>,
    #[serde(default)]
    pub histogram: Option<HistogramSpec>,
    #[serde(default)]
    pub pca_target: Option<PcaTarget>,
    #[serde(default)]
    pub classifiers: Option<Vec<ClassifierKind>>,
    #[serde(default)]
    pub svm_kernel: Option<KernelChoice>,
    #[serde(default)]
    pub svm_c: Option<f64>,
    #[serde(default)]
    pub svm_tolerance: Option<f64>,
    #[serde(default)]
    pub knn_k: Option<usize>,
    #[serde(default)]
    pub split_ratio: Option<f64>,
    #[serde(default)]
    pub split_before_augment: Option<bool>,
    #[serde(default)]
    pub master_seed: Option<u64>,
}

/// A fully resolved experiment: every knob explicit, ready to hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub protocol: Protocol,
    pub placement: NoisePlacement,
    /// Corpus A carries label 0, corpus B label 1.
    pub noise_pair: (NoiseKind, NoiseKind),
    pub sessions_per_noise: usize,
    pub key_length: usize,
    /// Upper end of the per-session uniform strength draw.
    pub p_max: f64,
    pub blocking: BlockingConfig,
    pub histogram: HistogramSpec,
    pub pca_target: PcaTarget,
    pub classifiers: Vec<ClassifierKind>,
    pub svm_kernel: KernelChoice,
    pub svm_c: f64,
    pub svm_tolerance: f64,
    pub knn_k: usize,
    pub split_ratio: f64,
    /// When true, raw QBER values are partitioned before augmentation so no
    /// value feeds both sides of the split.
    pub split_before_augment: bool,
    pub master_seed: u64,
}

impl ConfigOverrides {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Io {
            stage: "config",
            message: format!("reading {}: {e}", path.display()),
        })?;
        serde_json::from_str(&text).map_err(|e| {
            PipelineError::Validation(format!("config {}: {e}", path.display()))
        })
    }

    /// Fills in scenario defaults and validates. `seed_override` (the CLI
    /// `--seed`) wins over the file's `master_seed`. Returns the config plus
    /// any non-fatal warnings.
    pub fn resolve(
        &self,
        seed_override: Option<u64>,
    ) -> Result<(ExperimentConfig, Vec<String>), PipelineError> {
        let scenario = self.scenario.ok_or_else(|| {
            PipelineError::Validation("scenario: required (channel_remote or gate_based)".into())
        })?;
        let protocol = self.protocol.unwrap_or(Protocol::Bb84);
        let (placement, default_p_max, default_kernel) = match scenario {
            Scenario::ChannelRemote => (
                NoisePlacement::Transmission,
                1.0,
                KernelChoice::Rbf { gamma: None },
            ),
            Scenario::GateBased => (NoisePlacement::Gate, 0.1, KernelChoice::Linear),
        };
        let (default_count, default_size, default_pca) = match (scenario, protocol) {
            (Scenario::ChannelRemote, _) => (50, 4000, PcaTarget::Components(3)),
            (Scenario::GateBased, Protocol::Bb84) => (200, 1000, PcaTarget::Components(3)),
            (Scenario::GateBased, Protocol::Bbm92) => {
                (100, 2000, PcaTarget::VarianceThreshold(0.99))
            }
        };

        let master_seed = seed_override
            .or(self.master_seed)
            .unwrap_or(DEFAULT_MASTER_SEED);
        let blocking = BlockingConfig {
            block_count: self.block_count.unwrap_or(default_count),
            block_size: self.block_size.unwrap_or(default_size),
            shuffle_rounds: self.shuffle_rounds.unwrap_or(100),
            shuffle_seed: derive_seed(master_seed, SEED_TAG_SHUFFLE),
        };
        let mut classifiers = self
            .classifiers
            .clone()
            .unwrap_or_else(|| ClassifierKind::ALL.to_vec());
        classifiers.sort_unstable();
        classifiers.dedup();

        let config = ExperimentConfig {
            scenario,
            protocol,
            placement,
            noise_pair: self.noise_pair.unwrap_or_else(|| {
                let [a, b] = scenario.usual_noises();
                (a, b)
            }),
            sessions_per_noise: self
                .sessions_per_noise
                .unwrap_or(blocking.block_count * blocking.block_size),
            key_length: self.key_length.unwrap_or(16),
            p_max: self.p_max.unwrap_or(default_p_max),
            blocking,
            histogram: self.histogram.unwrap_or_default(),
            pca_target: self.pca_target.unwrap_or(default_pca),
            classifiers,
            svm_kernel: self.svm_kernel.unwrap_or(default_kernel),
            svm_c: self.svm_c.unwrap_or(1.0),
            svm_tolerance: self.svm_tolerance.unwrap_or(1e-3),
            knn_k: self.knn_k.unwrap_or(2),
            split_ratio: self.split_ratio.unwrap_or(0.7),
            split_before_augment: self.split_before_augment.unwrap_or(false),
            master_seed,
        };
        config.validate()?;

        let mut warnings = Vec::new();
        let usual = scenario.usual_noises();
        let (a, b) = config.noise_pair;
        if !(usual.contains(&a) && usual.contains(&b)) {
            warnings.push(format!(
                "noise pair ({}, {}) is outside the usual set for the {} scenario ({}, {}); \
                 running anyway",
                a.label(),
                b.label(),
                scenario.label(),
                usual[0].label(),
                usual[1].label(),
            ));
        }
        Ok((config, warnings))
    }
}

impl ExperimentConfig {
    /// Checks every field, reporting all problems at once.
    pub fn validate(&self) -> Result<(), PipelineError> {
        let mut problems: Vec<String> = Vec::new();
        let (a, b) = self.noise_pair;
        if a == b {
            problems.push(format!(
                "noise_pair: members must be distinct, got {} twice",
                a.label()
            ));
        }
        if self.sessions_per_noise == 0 {
            problems.push("sessions_per_noise: must be positive".into());
        }
        let needed = self.blocking.block_count * self.blocking.block_size;
        if self.sessions_per_noise < needed {
            problems.push(format!(
                "sessions_per_noise: {} is below block_count * block_size = {needed}",
                self.sessions_per_noise
            ));
        }
        if self.key_length == 0 {
            problems.push("key_length: must be at least 1".into());
        }
        if !(0.0..=1.0).contains(&self.p_max) {
            problems.push(format!("p_max: {} outside [0, 1]", self.p_max));
        }
        if let Err(e) = self.blocking.validate() {
            problems.push(format!("blocking: {e}"));
        }
        if let Err(e) = self.histogram.validate() {
            problems.push(format!("histogram: {e}"));
        }
        match self.pca_target {
            PcaTarget::Components(0) => {
                problems.push("pca_target: component count must be at least 1".into())
            }
            PcaTarget::Components(k) if k > FEATURE_COUNT => problems.push(format!(
                "pca_target: component count {k} exceeds the {FEATURE_COUNT} features"
            )),
            PcaTarget::VarianceThreshold(t) if !(t > 0.0 && t <= 1.0) => {
                problems.push(format!("pca_target: variance threshold {t} outside (0, 1]"))
            }
            _ => {}
        }
        if self.classifiers.is_empty() {
            problems.push("classifiers: need at least one".into());
        }
        match self.svm_kernel {
            KernelChoice::Rbf { gamma: Some(g) } if !(g.is_finite() && g > 0.0) => {
                problems.push(format!("svm_kernel: rbf gamma {g} must be positive"));
            }
            KernelChoice::Poly {
                degree,
                gamma,
                coef0,
            } => {
                if degree == 0 {
                    problems.push("svm_kernel: poly degree must be at least 1".into());
                }
                if let Some(g) = gamma {
                    if !(g.is_finite() && g > 0.0) {
                        problems.push(format!("svm_kernel: poly gamma {g} must be positive"));
                    }
                }
                if let Some(c0) = coef0 {
                    if !c0.is_finite() {
                        problems.push(format!("svm_kernel: poly coef0 {c0} must be finite"));
                    }
                }
            }
            _ => {}
        }
        if !(self.svm_c.is_finite() && self.svm_c > 0.0) {
            problems.push(format!("svm_c: {} must be positive", self.svm_c));
        }
        if !(self.svm_tolerance.is_finite() && self.svm_tolerance > 0.0) {
            problems.push(format!("svm_tolerance: {} must be positive", self.svm_tolerance));
        }
        if self.knn_k == 0 {
            problems.push("knn_k: must be at least 1".into());
        }
        if !(self.split_ratio > 0.0 && self.split_ratio < 1.0) {
            problems.push(format!("split_ratio: {} outside (0, 1)", self.split_ratio));
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(PipelineError::Validation(problems.join("; ")))
        }
    }

    pub fn corpus_seed_a(&self) -> u64 {
        derive_seed(self.master_seed, SEED_TAG_CORPUS_A)
    }

    pub fn corpus_seed_b(&self) -> u64 {
        derive_seed(self.master_seed, SEED_TAG_CORPUS_B)
    }

    pub fn split_seed(&self) -> u64 {
        derive_seed(self.master_seed, SEED_TAG_SPLIT)
    }

    /// Session parameters for one of the two noise kinds.
    pub fn session_config(&self, noise: NoiseKind) -> SessionConfig {
        SessionConfig {
            protocol: self.protocol,
            placement: self.placement,
            noise,
            strength: NoiseStrength::Uniform { p_max: self.p_max },
            key_length: self.key_length,
        }
    }
}
