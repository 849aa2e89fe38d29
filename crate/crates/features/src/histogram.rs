//! Fixed-range histograms over QBER values.

use serde::{Deserialize, Serialize};

use crate::error::FeatureError;

/// Equal-width binning over a closed range.
///
/// The default — ten bins over `[0, 1]` — matches how error rates are
/// summarised throughout the pipeline.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HistogramSpec {
    pub bins: usize,
    pub lo: f64,
    pub hi: f64,
}

impl Default for HistogramSpec {
    fn default() -> Self {
        HistogramSpec {
            bins: 10,
            lo: 0.0,
            hi: 1.0,
        }
    }
}

impl HistogramSpec {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if self.bins == 0 {
            return Err(FeatureError::InvalidHistogram("zero bins".into()));
        }
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.lo >= self.hi {
            return Err(FeatureError::InvalidHistogram(format!(
                "range [{}, {}] is not a finite non-empty interval",
                self.lo, self.hi
            )));
        }
        Ok(())
    }

    pub fn bin_width(&self) -> f64 {
        (self.hi - self.lo) / self.bins as f64
    }

    /// Midpoint of bin `index`.
    pub fn bin_center(&self, index: usize) -> f64 {
        self.lo + (index as f64 + 0.5) * self.bin_width()
    }

    /// Bin holding `value`. The final bin is closed (`hi` belongs to it),
    /// and out-of-range values clamp to the nearest edge bin.
    pub fn bin_index(&self, value: f64) -> usize {
        let raw = (value - self.lo) / self.bin_width();
        if raw <= 0.0 {
            return 0;
        }
        (raw as usize).min(self.bins - 1)
    }
}

/// Bin counts for `values` under `spec`. Total count always equals
/// `values.len()`.
pub fn histogram(values: &[f64], spec: &HistogramSpec) -> Result<Vec<usize>, FeatureError> {
    spec.validate()?;
    if values.is_empty() {
        return Err(FeatureError::EmptyInput);
    }
    let mut counts = vec![0usize; spec.bins];
    for &v in values {
        counts[spec.bin_index(v)] += 1;
    }
    Ok(counts)
}

/// Mean and standard deviation of each bin's count across many same-sized
/// blocks — the "averaged histogram" summary of a corpus.
///
/// The corpus is cut into `block_count` consecutive blocks of `block_size`
/// values; the mean is the average bin height and the deviation is the
/// population spread of the heights.
pub fn averaged_histogram(
    values: &[f64],
    block_count: usize,
    block_size: usize,
    spec: &HistogramSpec,
) -> Result<(Vec<f64>, Vec<f64>), FeatureError> {
    spec.validate()?;
    if block_count == 0 || block_size == 0 {
        return Err(FeatureError::InvalidBlocking(
            "block_count and block_size must be positive".into(),
        ));
    }
    let required = block_count * block_size;
    if values.len() < required {
        return Err(FeatureError::InsufficientData {
            which: "averaged histogram input",
            required,
            available: values.len(),
        });
    }
    let mut per_block = Vec::with_capacity(block_count);
    for b in 0..block_count {
        per_block.push(histogram(&values[b * block_size..(b + 1) * block_size], spec)?);
    }
    let mut means = vec![0.0; spec.bins];
    let mut stds = vec![0.0; spec.bins];
    for bin in 0..spec.bins {
        let mean = per_block.iter().map(|h| h[bin] as f64).sum::<f64>() / block_count as f64;
        let var = per_block
            .iter()
            .map(|h| (h[bin] as f64 - mean).powi(2))
            .sum::<f64>()
            / block_count as f64;
        means[bin] = mean;
        stds[bin] = var.sqrt();
    }
    Ok((means, stds))
}
