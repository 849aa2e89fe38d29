//! The five pipeline stages.
//!
//! Every stage reads its inputs from, and writes its outputs to, one
//! artifact directory using fixed file names, so each stage can be re-run
//! (or tested) on its own. `cmd_pipeline` chains them and assembles the
//! consolidated report.

use std::fs;
use std::path::Path;

use features::{
    averaged_histogram, build_dataset, build_split_datasets, load_dataset, save_dataset,
    FeatureVector, LabeledDataset, FEATURE_COUNT,
};
use ml::{
    default_rbf_gamma, evaluate, fit_gnb, fit_knn, fit_pca, fit_svm, load_model, save_model,
    train_test_split, Classifier, Metrics, MlError, ModelPayload, SmoParams, SvmKernel,
};
use qkd::{generate_corpus, load_corpus, save_corpus, QberCorpus};
use serde::{Deserialize, Serialize};

use crate::config::{ClassifierKind, ExperimentConfig, KernelChoice};
use crate::error::{from_features, from_ml, from_qkd, PipelineError};
use crate::report::{
    config_sha256, file_sha256, save_report, unix_ms, ClassifierReport, RunReport, TipCurve,
    REPORT_SCHEMA_VERSION,
};

/// Fixed artifact names inside the output directory.
pub mod artifact {
    use crate::config::ClassifierKind;

    /// QBER corpus of the first configured noise (label 0).
    pub const CORPUS_A: &str = "corpus_a.csv";
    /// QBER corpus of the second configured noise (label 1).
    pub const CORPUS_B: &str = "corpus_b.csv";
    /// Full augmented dataset (augment-then-split mode only).
    pub const DATASET: &str = "dataset.csv";
    pub const DATASET_TRAIN: &str = "dataset_train.csv";
    pub const DATASET_TEST: &str = "dataset_test.csv";
    /// Plot-ready averaged histogram heights per noise.
    pub const HISTOGRAM_TIPS: &str = "histogram_tips.csv";
    /// Explained-variance ratio per principal component.
    pub const SCREE: &str = "scree.csv";
    pub const MODEL_PCA: &str = "model_pca.json";
    pub const TRAIN_METRICS: &str = "train_metrics.json";
    pub const TEST_METRICS: &str = "test_metrics.json";
    pub const REPORT: &str = "report.json";

    pub fn model(kind: ClassifierKind) -> String {
        format!("model_{}.json", kind.label())
    }

    /// Predicted label over a 200x200 grid of the first two components.
    pub fn decision_grid(kind: ClassifierKind) -> String {
        format!("decision_grid_{}.csv", kind.label())
    }
}

/// Side length of the decision-region grids.
pub const GRID_STEPS: usize = 200;

/// Generates and stores both QBER corpora.
pub fn cmd_simulate(config: &ExperimentConfig, out_dir: &Path) -> Result<(), PipelineError> {
    const STAGE: &str = "simulate";
    ensure_out_dir(out_dir)?;
    let jobs = [
        (config.noise_pair.0, config.corpus_seed_a(), artifact::CORPUS_A),
        (config.noise_pair.1, config.corpus_seed_b(), artifact::CORPUS_B),
    ];
    for (noise, seed, name) in jobs {
        let session = config.session_config(noise);
        let corpus = generate_corpus(&session, config.sessions_per_noise, seed)
            .map_err(|e| from_qkd(STAGE, e))?;
        save_corpus(&corpus, &out_dir.join(name)).map_err(|e| from_qkd(STAGE, e))?;
    }
    Ok(())
}

pub struct FeaturizeOutcome {
    pub tips: Vec<TipCurve>,
}

/// Builds the labeled feature dataset (or the pre-split pair) plus the
/// averaged histogram curves.
pub fn cmd_featurize(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<FeaturizeOutcome, PipelineError> {
    const STAGE: &str = "featurize";
    ensure_out_dir(out_dir)?;
    let (a, b) = load_corpora(config, out_dir, STAGE)?;

    let mut tips = Vec::with_capacity(2);
    for corpus in [&a, &b] {
        let (tip_means, tip_stds) = averaged_histogram(
            &corpus.values,
            config.blocking.block_count,
            config.blocking.block_size,
            &config.histogram,
        )
        .map_err(|e| from_features(STAGE, e))?;
        tips.push(TipCurve {
            noise: corpus.label.label().to_string(),
            bin_centers: (0..config.histogram.bins)
                .map(|i| config.histogram.bin_center(i))
                .collect(),
            tip_means,
            tip_stds,
        });
    }
    write_tips_csv(&tips, &out_dir.join(artifact::HISTOGRAM_TIPS))?;

    if config.split_before_augment {
        let (train, test) = build_split_datasets(
            &a,
            &b,
            &config.blocking,
            &config.histogram,
            config.split_ratio,
            config.split_seed(),
        )
        .map_err(|e| from_features(STAGE, e))?;
        save_dataset(&train, &out_dir.join(artifact::DATASET_TRAIN))
            .map_err(|e| from_features(STAGE, e))?;
        save_dataset(&test, &out_dir.join(artifact::DATASET_TEST))
            .map_err(|e| from_features(STAGE, e))?;
    } else {
        let dataset = build_dataset(&a, &b, &config.blocking, &config.histogram)
            .map_err(|e| from_features(STAGE, e))?;
        save_dataset(&dataset, &out_dir.join(artifact::DATASET))
            .map_err(|e| from_features(STAGE, e))?;
    }
    Ok(FeaturizeOutcome { tips })
}

pub struct TrainedClassifier {
    pub kind: ClassifierKind,
    pub train_metrics: Metrics,
    /// False when the SVM ran out of sweeps and the partial model was kept.
    pub converged: bool,
}

pub struct TrainOutcome {
    pub scree: Vec<f64>,
    pub classifiers: Vec<TrainedClassifier>,
    pub warnings: Vec<String>,
}

/// One line of `train_metrics.json` / `test_metrics.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsEntry {
    pub classifier: String,
    pub metrics: Metrics,
    /// Present in the train file only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub converged: Option<bool>,
}

/// Splits (unless pre-split), fits PCA on the training rows only, then fits
/// and stores every configured classifier in the projected space.
///
/// SVM non-convergence is demoted to a warning: the partial model is kept
/// so the remaining classifiers still train and the report stays complete.
pub fn cmd_train(config: &ExperimentConfig, out_dir: &Path) -> Result<TrainOutcome, PipelineError> {
    const STAGE: &str = "train";
    ensure_out_dir(out_dir)?;
    let train = obtain_training_rows(config, out_dir)?;
    let (train_x, train_y) = train.to_matrix();

    let pca = fit_pca(&train_x, config.pca_target).map_err(|e| from_ml(STAGE, e))?;
    save_model(&out_dir.join(artifact::MODEL_PCA), &ModelPayload::Pca(pca.clone()))
        .map_err(|e| from_ml(STAGE, e))?;
    write_scree_csv(&pca.explained_variance_ratio, &out_dir.join(artifact::SCREE))?;
    let train_z = pca.transform(&train_x).map_err(|e| from_ml(STAGE, e))?;

    let mut outcome = TrainOutcome {
        scree: pca.explained_variance_ratio.clone(),
        classifiers: Vec::with_capacity(config.classifiers.len()),
        warnings: Vec::new(),
    };
    for &kind in &config.classifiers {
        let (payload, converged) = match kind {
            ClassifierKind::Knn => (
                ModelPayload::Knn(
                    fit_knn(&train_z, &train_y, config.knn_k).map_err(|e| from_ml(STAGE, e))?,
                ),
                true,
            ),
            ClassifierKind::Gnb => (
                ModelPayload::Gnb(fit_gnb(&train_z, &train_y).map_err(|e| from_ml(STAGE, e))?),
                true,
            ),
            ClassifierKind::Svm => {
                let kernel = resolve_kernel(&config.svm_kernel, &train_z)?;
                let params = SmoParams {
                    c: config.svm_c,
                    tolerance: config.svm_tolerance,
                    sweep_factor: 10,
                };
                match fit_svm(&train_z, &train_y, kernel, params) {
                    Ok(model) => (ModelPayload::Svm(model), true),
                    Err(MlError::NonConvergence { sweeps, model }) => {
                        outcome.warnings.push(format!(
                            "svm stopped at its sweep budget ({sweeps} sweeps); \
                             keeping the partial model"
                        ));
                        (ModelPayload::Svm(*model), false)
                    }
                    Err(e) => return Err(from_ml(STAGE, e)),
                }
            }
        };
        let classifier = payload_classifier(&payload).expect("classifier payload");
        let train_metrics =
            evaluate(classifier, &train_z, &train_y).map_err(|e| from_ml(STAGE, e))?;
        save_model(&out_dir.join(artifact::model(kind)), &payload)
            .map_err(|e| from_ml(STAGE, e))?;
        outcome.classifiers.push(TrainedClassifier {
            kind,
            train_metrics,
            converged,
        });
    }

    let entries: Vec<MetricsEntry> = outcome
        .classifiers
        .iter()
        .map(|t| MetricsEntry {
            classifier: t.kind.label().to_string(),
            metrics: t.train_metrics,
            converged: Some(t.converged),
        })
        .collect();
    write_metrics_json(&entries, &out_dir.join(artifact::TRAIN_METRICS), STAGE)?;
    Ok(outcome)
}

pub struct EvalOutcome {
    pub metrics: Vec<(ClassifierKind, Metrics)>,
}

/// Scores the stored models on the held-out rows and writes the per-model
/// decision-region grids.
pub fn cmd_evaluate(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<EvalOutcome, PipelineError> {
    const STAGE: &str = "evaluate";
    let test = load_dataset(&out_dir.join(artifact::DATASET_TEST))
        .map_err(|e| from_features(STAGE, e))?;
    let (test_x, test_y) = test.to_matrix();
    let pca = match load_model(&out_dir.join(artifact::MODEL_PCA)).map_err(|e| from_ml(STAGE, e))?
    {
        ModelPayload::Pca(m) => m,
        other => {
            return Err(PipelineError::io(
                STAGE,
                format!(
                    "{} holds a {} model, expected pca",
                    artifact::MODEL_PCA,
                    payload_label(&other)
                ),
            ))
        }
    };
    let test_z = pca.transform(&test_x).map_err(|e| from_ml(STAGE, e))?;

    let mut metrics = Vec::with_capacity(config.classifiers.len());
    for &kind in &config.classifiers {
        let name = artifact::model(kind);
        let payload = load_model(&out_dir.join(&name)).map_err(|e| from_ml(STAGE, e))?;
        let matches = matches!(
            (kind, &payload),
            (ClassifierKind::Knn, ModelPayload::Knn(_))
                | (ClassifierKind::Gnb, ModelPayload::Gnb(_))
                | (ClassifierKind::Svm, ModelPayload::Svm(_))
        );
        if !matches {
            return Err(PipelineError::io(
                STAGE,
                format!(
                    "{name} holds a {} model, expected {}",
                    payload_label(&payload),
                    kind.label()
                ),
            ));
        }
        let classifier = payload_classifier(&payload).expect("classifier payload");
        let scored = evaluate(classifier, &test_z, &test_y).map_err(|e| from_ml(STAGE, e))?;
        write_decision_grid(
            classifier,
            &test_z,
            &out_dir.join(artifact::decision_grid(kind)),
        )?;
        metrics.push((kind, scored));
    }

    let entries: Vec<MetricsEntry> = metrics
        .iter()
        .map(|(kind, m)| MetricsEntry {
            classifier: kind.label().to_string(),
            metrics: *m,
            converged: None,
        })
        .collect();
    write_metrics_json(&entries, &out_dir.join(artifact::TEST_METRICS), STAGE)?;
    Ok(EvalOutcome { metrics })
}

/// Runs all four stages and writes the consolidated report.
pub fn cmd_pipeline(
    config: &ExperimentConfig,
    out_dir: &Path,
    mut warnings: Vec<String>,
) -> Result<RunReport, PipelineError> {
    let started_unix_ms = unix_ms();
    cmd_simulate(config, out_dir)?;
    let featurized = cmd_featurize(config, out_dir)?;
    let trained = cmd_train(config, out_dir)?;
    let evaluated = cmd_evaluate(config, out_dir)?;
    warnings.extend(trained.warnings.iter().cloned());

    let classifiers = trained
        .classifiers
        .iter()
        .map(|t| {
            let (_, test) = evaluated
                .metrics
                .iter()
                .find(|(kind, _)| *kind == t.kind)
                .expect("every trained classifier is evaluated");
            ClassifierReport {
                classifier: t.kind.label().to_string(),
                train: t.train_metrics,
                test: *test,
                converged: t.converged,
            }
        })
        .collect();

    let report = RunReport {
        schema_version: REPORT_SCHEMA_VERSION,
        config: config.clone(),
        config_sha256: config_sha256(config)?,
        master_seed: config.master_seed,
        started_unix_ms,
        finished_unix_ms: unix_ms(),
        corpus_sha256: (
            file_sha256(&out_dir.join(artifact::CORPUS_A))?,
            file_sha256(&out_dir.join(artifact::CORPUS_B))?,
        ),
        scree: trained.scree,
        histogram_tips: featurized.tips,
        classifiers,
        warnings,
    };
    save_report(&report, &out_dir.join(artifact::REPORT))?;
    Ok(report)
}

fn ensure_out_dir(out_dir: &Path) -> Result<(), PipelineError> {
    fs::create_dir_all(out_dir).map_err(|e| PipelineError::Io {
        stage: "setup",
        message: format!("creating {}: {e}", out_dir.display()),
    })
}

fn load_corpora(
    config: &ExperimentConfig,
    out_dir: &Path,
    stage: &'static str,
) -> Result<(QberCorpus, QberCorpus), PipelineError> {
    let a = load_corpus(&out_dir.join(artifact::CORPUS_A)).map_err(|e| from_qkd(stage, e))?;
    let b = load_corpus(&out_dir.join(artifact::CORPUS_B)).map_err(|e| from_qkd(stage, e))?;
    if a.label != config.noise_pair.0 || b.label != config.noise_pair.1 {
        return Err(PipelineError::runtime(
            stage,
            format!(
                "stored corpora are ({}, {}) but the config expects ({}, {}); re-run simulate",
                a.label.label(),
                b.label.label(),
                config.noise_pair.0.label(),
                config.noise_pair.1.label()
            ),
        ));
    }
    Ok((a, b))
}

/// Loads the training rows, splitting and persisting both sides first when
/// the dataset was built in augment-then-split mode.
fn obtain_training_rows(
    config: &ExperimentConfig,
    out_dir: &Path,
) -> Result<LabeledDataset, PipelineError> {
    const STAGE: &str = "train";
    if config.split_before_augment {
        return load_dataset(&out_dir.join(artifact::DATASET_TRAIN))
            .map_err(|e| from_features(STAGE, e));
    }
    let full = load_dataset(&out_dir.join(artifact::DATASET)).map_err(|e| from_features(STAGE, e))?;
    let (x, y) = full.to_matrix();
    let split =
        train_test_split(&x, &y, config.split_ratio, config.split_seed()).map_err(|e| from_ml(STAGE, e))?;
    let train = dataset_from_rows(split.train_x, split.train_y, STAGE)?;
    let test = dataset_from_rows(split.test_x, split.test_y, STAGE)?;
    save_dataset(&train, &out_dir.join(artifact::DATASET_TRAIN))
        .map_err(|e| from_features(STAGE, e))?;
    save_dataset(&test, &out_dir.join(artifact::DATASET_TEST))
        .map_err(|e| from_features(STAGE, e))?;
    Ok(train)
}

fn dataset_from_rows(
    rows: Vec<Vec<f64>>,
    labels: Vec<u8>,
    stage: &'static str,
) -> Result<LabeledDataset, PipelineError> {
    let vectors = rows
        .into_iter()
        .map(|row| {
            let array: [f64; FEATURE_COUNT] = row.try_into().map_err(|bad: Vec<f64>| {
                PipelineError::runtime(
                    stage,
                    format!("feature row has {} values, expected {FEATURE_COUNT}", bad.len()),
                )
            })?;
            Ok(FeatureVector::from_array(array))
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;
    Ok(LabeledDataset { vectors, labels })
}

fn resolve_kernel(
    choice: &KernelChoice,
    train_z: &[Vec<f64>],
) -> Result<SvmKernel, PipelineError> {
    const STAGE: &str = "train";
    let data_gamma = |explicit: Option<f64>| -> Result<f64, PipelineError> {
        match explicit {
            Some(g) => Ok(g),
            None => default_rbf_gamma(train_z).map_err(|e| from_ml(STAGE, e)),
        }
    };
    Ok(match *choice {
        KernelChoice::Linear => SvmKernel::Linear,
        KernelChoice::Rbf { gamma } => SvmKernel::Rbf {
            gamma: data_gamma(gamma)?,
        },
        KernelChoice::Poly {
            degree,
            gamma,
            coef0,
        } => SvmKernel::Poly {
            degree,
            gamma: data_gamma(gamma)?,
            coef0: coef0.unwrap_or(1.0),
        },
    })
}

fn payload_classifier(payload: &ModelPayload) -> Option<&dyn Classifier> {
    match payload {
        ModelPayload::Knn(m) => Some(m),
        ModelPayload::Gnb(m) => Some(m),
        ModelPayload::Svm(m) => Some(m),
        ModelPayload::Pca(_) => None,
    }
}

fn payload_label(payload: &ModelPayload) -> &'static str {
    match payload {
        ModelPayload::Pca(_) => "pca",
        ModelPayload::Knn(_) => "knn",
        ModelPayload::Gnb(_) => "gnb",
        ModelPayload::Svm(_) => "svm",
    }
}

fn io_err(stage: &'static str, path: &Path, e: impl std::fmt::Display) -> PipelineError {
    PipelineError::io(stage, format!("{}: {e}", path.display()))
}

fn write_tips_csv(tips: &[TipCurve], path: &Path) -> Result<(), PipelineError> {
    const STAGE: &str = "featurize";
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(STAGE, path, e))?;
    writer
        .write_record(["noise", "bin_center", "tip_mean", "tip_std"])
        .map_err(|e| io_err(STAGE, path, e))?;
    for curve in tips {
        for ((center, mean), std) in curve
            .bin_centers
            .iter()
            .zip(&curve.tip_means)
            .zip(&curve.tip_stds)
        {
            writer
                .write_record([
                    curve.noise.clone(),
                    format!("{center:.16e}"),
                    format!("{mean:.16e}"),
                    format!("{std:.16e}"),
                ])
                .map_err(|e| io_err(STAGE, path, e))?;
        }
    }
    writer.flush().map_err(|e| io_err(STAGE, path, e))
}

fn write_scree_csv(ratios: &[f64], path: &Path) -> Result<(), PipelineError> {
    const STAGE: &str = "train";
    let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(STAGE, path, e))?;
    writer
        .write_record(["component", "explained_variance_ratio"])
        .map_err(|e| io_err(STAGE, path, e))?;
    for (i, ratio) in ratios.iter().enumerate() {
        writer
            .write_record([format!("{}", i + 1), format!("{ratio:.16e}")])
            .map_err(|e| io_err(STAGE, path, e))?;
    }
    writer.flush().map_err(|e| io_err(STAGE, path, e))
}

fn write_metrics_json(
    entries: &[MetricsEntry],
    path: &Path,
    stage: &'static str,
) -> Result<(), PipelineError> {
    let mut text = serde_json::to_string_pretty(entries).map_err(|e| io_err(stage, path, e))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| io_err(stage, path, e))
}

/// Classifies a `GRID_STEPS`-squared lattice spanning the first two
/// projected dimensions (10% padding, any further dimensions pinned to 0)
/// and stores it as plot-ready CSV. Skipped when the projection has fewer
/// than two dimensions.
fn write_decision_grid(
    model: &dyn Classifier,
    projected: &[Vec<f64>],
    path: &Path,
) -> Result<(), PipelineError> {
    const STAGE: &str = "evaluate";
    let dim = projected.first().map_or(0, Vec::len);
    if dim < 2 {
        return Ok(());
    }
    let bounds = |axis: usize| {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in projected {
            lo = lo.min(row[axis]);
            hi = hi.max(row[axis]);
        }
        let pad = if hi > lo { 0.1 * (hi - lo) } else { 1.0 };
        (lo - pad, hi + pad)
    };
    let (x_lo, x_hi) = bounds(0);
    let (y_lo, y_hi) = bounds(1);
    let coordinate = |lo: f64, hi: f64, step: usize| {
        lo + (hi - lo) * step as f64 / (GRID_STEPS - 1) as f64
    };

    let mut queries = Vec::with_capacity(GRID_STEPS * GRID_STEPS);
    for iy in 0..GRID_STEPS {
        let y = coordinate(y_lo, y_hi, iy);
        for ix in 0..GRID_STEPS {
            let mut q = vec![0.0; dim];
            q[0] = coordinate(x_lo, x_hi, ix);
            q[1] = y;
            queries.push(q);
        }
    }
    let labels = model.predict(&queries).map_err(|e| from_ml(STAGE, e))?;

    let mut writer = csv::Writer::from_path(path).map_err(|e| io_err(STAGE, path, e))?;
    writer
        .write_record(["x", "y", "label"])
        .map_err(|e| io_err(STAGE, path, e))?;
    for (q, label) in queries.iter().zip(&labels) {
        writer
            .write_record([
                format!("{:.16e}", q[0]),
                format!("{:.16e}", q[1]),
                format!("{label}"),
            ])
            .map_err(|e| io_err(STAGE, path, e))?;
    }
    writer.flush().map_err(|e| io_err(STAGE, path, e))
}
