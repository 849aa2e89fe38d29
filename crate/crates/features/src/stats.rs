//! The seven-number summary of a QBER block.
//!
//! Moments are *population* moments (divide by `n`, not `n - 1`), kurtosis
//! is excess kurtosis (normal = 0), and the histogram-derived features use
//! the block's binning: the mode is the centre of the fullest bin and the
//! area-under-curve is the rectangle sum `sum(count_i * width)`.

use serde::{Deserialize, Serialize};

use crate::error::FeatureError;
use crate::histogram::{histogram, HistogramSpec};

pub const FEATURE_COUNT: usize = 7;
/// Column order used everywhere a feature vector is flattened.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] =
    ["mean", "median", "mode", "std", "skewness", "kurtosis", "auc"];

/// Blocks whose variance falls below this are treated as constant: their
/// shape moments are defined to be zero instead of amplifying rounding
/// noise through the m2^(3/2) and m2^2 denominators.
const DEGENERATE_VARIANCE: f64 = 1e-24;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub mean: f64,
    pub median: f64,
    pub mode: f64,
    pub std: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub auc: f64,
}

impl FeatureVector {
    pub fn as_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.mean,
            self.median,
            self.mode,
            self.std,
            self.skewness,
            self.kurtosis,
            self.auc,
        ]
    }

    pub fn from_array(values: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            mean: values[0],
            median: values[1],
            mode: values[2],
            std: values[3],
            skewness: values[4],
            kurtosis: values[5],
            auc: values[6],
        }
    }
}

/// Summarises one block of QBER values.
///
/// Needs at least two values; a shorter block has no meaningful spread.
pub fn extract_features(
    block: &[f64],
    spec: &HistogramSpec,
) -> Result<FeatureVector, FeatureError> {
    if block.len() < 2 {
        return Err(FeatureError::BlockTooShort { len: block.len() });
    }
    let n = block.len() as f64;

    let mean = block.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0f64, 0.0f64, 0.0f64);
    for &v in block {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;

    let std = m2.sqrt();
    let (skewness, kurtosis) = if m2 < DEGENERATE_VARIANCE {
        (0.0, 0.0)
    } else {
        (m3 / (m2 * std), m4 / (m2 * m2) - 3.0)
    };

    let mut sorted = block.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    let median = if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    };

    let counts = histogram(block, spec)?;
    // First fullest bin wins ties.
    let fullest = counts
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.cmp(b).then(ib.cmp(ia)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mode = spec.bin_center(fullest);
    let auc = counts.iter().sum::<usize>() as f64 * spec.bin_width();

    Ok(FeatureVector {
        mean,
        median,
        mode,
        std,
        skewness,
        kurtosis,
        auc,
    })
}
