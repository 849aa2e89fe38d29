//! Turning QBER corpora into labeled feature datasets.
//!
//! The chain is: histogram a block of error rates, summarise it with seven
//! descriptive statistics (mean, median, mode, standard deviation,
//! skewness, excess kurtosis, area under the histogram), and stack
//! shuffle-augmented rounds of such rows into a two-class dataset.

mod dataset;
mod error;
mod histogram;
mod stats;

pub use dataset::{
    build_dataset, build_split_datasets, load_dataset, save_dataset, BlockingConfig,
    LabeledDataset,
};
pub use error::FeatureError;
pub use histogram::{averaged_histogram, histogram, HistogramSpec};
pub use stats::{extract_features, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
