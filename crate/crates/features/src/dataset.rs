//! Labeled feature datasets built from pairs of QBER corpora.
//!
//! Each corpus is cut into `block_count` blocks of `block_size` rates; each
//! block collapses to one seven-feature row labeled by its corpus (0 for
//! the first, 1 for the second). Because that yields only `2 * block_count`
//! rows, the corpus order is reshuffled `shuffle_rounds` times and the
//! blocking repeated, multiplying the row count. Round 0 always uses the
//! original corpus order; round `r > 0` uses a Fisher-Yates permutation
//! drawn from a dedicated ChaCha stream, so datasets are reproducible and
//! independent of thread count.
//!
//! Note the augmentation happens *before* any train/test split: rows from
//! different rounds share underlying QBER values, which leaks information
//! across a later split. That mirrors the historical construction this
//! pipeline reproduces. [`build_split_datasets`] is the leak-free variant:
//! it partitions the raw values first and augments each side separately.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use qkd::QberCorpus;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::FeatureError;
use crate::histogram::HistogramSpec;
use crate::stats::{extract_features, FeatureVector, FEATURE_NAMES};

/// How corpora are cut into feature rows.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlockingConfig {
    /// Blocks per corpus per round.
    pub block_count: usize,
    /// QBER values per block.
    pub block_size: usize,
    /// Total blocking passes, counting the unshuffled round 0.
    pub shuffle_rounds: usize,
    /// Seed for the shuffle streams (one stream per corpus per round).
    pub shuffle_seed: u64,
}

impl BlockingConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.block_count == 0 {
            return Err(FeatureError::InvalidBlocking("block_count is zero".into()));
        }
        if self.block_size < 2 {
            return Err(FeatureError::InvalidBlocking(
                "block_size must be at least 2 for moment statistics".into(),
            ));
        }
        if self.shuffle_rounds == 0 {
            return Err(FeatureError::InvalidBlocking(
                "shuffle_rounds must be at least 1 (round 0 is the identity)".into(),
            ));
        }
        Ok(())
    }
}

/// Feature rows and their class labels, kept as parallel vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub vectors: Vec<FeatureVector>,
    pub labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Flattens into the `(rows, labels)` shape the classifiers consume.
    pub fn to_matrix(&self) -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            self.vectors.iter().map(|v| v.as_array().to_vec()).collect(),
            self.labels.clone(),
        )
    }
}

/// The corpus order used by one augmentation round.
fn round_order(values: &[f64], seed: u64, stream: u64, identity: bool) -> Vec<f64> {
    let mut out = values.to_vec();
    if !identity {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        out.shuffle(&mut rng);
    }
    out
}

fn check_corpus(
    corpus: &QberCorpus,
    which: &'static str,
    blocking: &BlockingConfig,
) -> Result<(), FeatureError> {
    let required = blocking.block_count * blocking.block_size;
    if corpus.values.len() < required {
        return Err(FeatureError::InsufficientData {
            which,
            required,
            available: corpus.values.len(),
        });
    }
    Ok(())
}

/// Builds the augmented dataset for a two-noise classification problem.
///
/// Row order is deterministic: rounds in order, blocks in order within a
/// round, and within each block index first the row from `corpus_a`
/// (label 0) then the row from `corpus_b` (label 1).
pub fn build_dataset(
    corpus_a: &QberCorpus,
    corpus_b: &QberCorpus,
    blocking: &BlockingConfig,
    spec: &HistogramSpec,
) -> Result<LabeledDataset, FeatureError> {
    blocking.validate()?;
    spec.validate()?;
    check_corpus(corpus_a, "first corpus", blocking)?;
    check_corpus(corpus_b, "second corpus", blocking)?;

    let per_round: Vec<Vec<(FeatureVector, u8)>> = (0..blocking.shuffle_rounds)
        .into_par_iter()
        .map(|round| {
            let identity = round == 0;
            let a = round_order(
                &corpus_a.values,
                blocking.shuffle_seed,
                2 * round as u64,
                identity,
            );
            let b = round_order(
                &corpus_b.values,
                blocking.shuffle_seed,
                2 * round as u64 + 1,
                identity,
            );
            let mut rows = Vec::with_capacity(2 * blocking.block_count);
            for block in 0..blocking.block_count {
                let span = block * blocking.block_size..(block + 1) * blocking.block_size;
                rows.push((extract_features(&a[span.clone()], spec)?, 0u8));
                rows.push((extract_features(&b[span], spec)?, 1u8));
            }
            Ok(rows)
        })
        .collect::<Result<_, FeatureError>>()?;

    let mut dataset = LabeledDataset {
        vectors: Vec::with_capacity(2 * blocking.block_count * blocking.shuffle_rounds),
        labels: Vec::with_capacity(2 * blocking.block_count * blocking.shuffle_rounds),
    };
    for rows in per_round {
        for (vector, label) in rows {
            dataset.vectors.push(vector);
            dataset.labels.push(label);
        }
    }
    Ok(dataset)
}

/// Leak-free alternative to [`build_dataset`]: splits each corpus's raw
/// values into a train part (`train_fraction`) and a test part first, then
/// augments both sides independently. No QBER value contributes to both
/// returned datasets.
///
/// Block counts scale with the fraction (`floor` on the train side), so
/// `train + test` still covers `block_count` blocks per round.
pub fn build_split_datasets(
    corpus_a: &QberCorpus,
    corpus_b: &QberCorpus,
    blocking: &BlockingConfig,
    spec: &HistogramSpec,
    train_fraction: f64,
    split_seed: u64,
) -> Result<(LabeledDataset, LabeledDataset), FeatureError> {
    blocking.validate()?;
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(FeatureError::InvalidFraction(train_fraction));
    }
    check_corpus(corpus_a, "first corpus", blocking)?;
    check_corpus(corpus_b, "second corpus", blocking)?;

    let train_blocks = (train_fraction * blocking.block_count as f64).floor() as usize;
    let test_blocks = blocking.block_count - train_blocks;
    if train_blocks == 0 || test_blocks == 0 {
        return Err(FeatureError::InvalidBlocking(format!(
            "splitting {} blocks at fraction {train_fraction} empties one side",
            blocking.block_count
        )));
    }

    let partition = |corpus: &QberCorpus, stream: u64| -> (QberCorpus, QberCorpus) {
        let mut indices: Vec<usize> = (0..corpus.values.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
        rng.set_stream(stream);
        indices.shuffle(&mut rng);
        let cut = (train_fraction * corpus.values.len() as f64).floor() as usize;
        let (mut head, mut tail) = (indices[..cut].to_vec(), indices[cut..].to_vec());
        head.sort_unstable();
        tail.sort_unstable();
        let pick = |idx: &[usize]| QberCorpus {
            values: idx.iter().map(|&i| corpus.values[i]).collect(),
            ..corpus.clone()
        };
        (pick(&head), pick(&tail))
    };

    let (a_train, a_test) = partition(corpus_a, 0);
    let (b_train, b_test) = partition(corpus_b, 1);

    let side = |blocks: usize| BlockingConfig {
        block_count: blocks,
        ..*blocking
    };
    let train = build_dataset(&a_train, &b_train, &side(train_blocks), spec)?;
    let test = build_dataset(&a_test, &b_test, &side(test_blocks), spec)?;
    Ok((train, test))
}

/// Writes a dataset as CSV: the seven feature columns then `label`.
pub fn save_dataset(dataset: &LabeledDataset, path: &Path) -> Result<(), FeatureError> {
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    let mut header: Vec<&str> = FEATURE_NAMES.to_vec();
    header.push("label");
    writer.write_record(&header)?;
    for (vector, label) in dataset.vectors.iter().zip(dataset.labels.iter()) {
        let mut row: Vec<String> = vector
            .as_array()
            .iter()
            .map(|v| format!("{v:.16e}"))
            .collect();
        row.push(label.to_string());
        writer.write_record(&row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Reads a dataset written by [`save_dataset`], verifying the header.
pub fn load_dataset(path: &Path) -> Result<LabeledDataset, FeatureError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(BufReader::new(File::open(path)?));
    {
        let headers = reader.headers()?;
        let expected: Vec<&str> = FEATURE_NAMES.iter().copied().chain(["label"]).collect();
        if headers.iter().collect::<Vec<_>>() != expected {
            return Err(FeatureError::Malformed(format!(
                "unexpected header {headers:?}"
            )));
        }
    }
    let mut dataset = LabeledDataset {
        vectors: Vec::new(),
        labels: Vec::new(),
    };
    for record in reader.records() {
        let record = record?;
        if record.len() != FEATURE_NAMES.len() + 1 {
            return Err(FeatureError::Malformed(format!(
                "row with {} fields",
                record.len()
            )));
        }
        let mut values = [0.0f64; 7];
        for (i, slot) in values.iter_mut().enumerate() {
            *slot = record[i]
                .parse()
                .map_err(|_| FeatureError::Malformed(format!("bad float {:?}", &record[i])))?;
        }
        let label: u8 = record[7]
            .parse()
            .map_err(|_| FeatureError::Malformed(format!("bad label {:?}", &record[7])))?;
        dataset.vectors.push(FeatureVector::from_array(values));
        dataset.labels.push(label);
    }
    Ok(dataset)
}
