//! Empirical confusion matrices.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::simplex::{weighted_argmax, SampleSet};

/// Tolerance on the total mass of a confusion matrix.
pub const MASS_TOLERANCE: f64 = 1e-9;

/// Row-major `m x m` matrix; entry `(i, j)` is the fraction of samples of
/// true class `i` predicted as `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfusionMatrix {
    m: usize,
    entries: Vec<f64>,
}

impl ConfusionMatrix {
    /// Validated construction from explicit fractions.
    pub fn from_entries(m: usize, entries: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("confusion matrix needs at least 2 classes"));
        }
        if entries.len() != m * m {
            return Err(Error::dims("confusion entries", m * m, entries.len()));
        }
        if entries.iter().any(|&e| !e.is_finite() || e < 0.0) {
            return Err(Error::invalid("confusion entries must be finite and >= 0"));
        }
        let total: f64 = entries.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::invalid(alloc::format!(
                "confusion entries sum to {total}, expected 1"
            )));
        }
        Ok(Self { m, entries })
    }

    /// Builds the matrix from integer cell counts over `n` samples.
    pub(crate) fn from_counts(m: usize, counts: &[u64], n: u64) -> Self {
        debug_assert_eq!(counts.len(), m * m);
        let denom = n as f64;
        let entries = counts.iter().map(|&c| c as f64 / denom).collect();
        Self { m, entries }
    }

    pub fn num_classes(&self) -> usize {
        self.m
    }

    /// Entry at (true class `i`, predicted class `j`).
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.m + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks_exact(self.m)
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.get(k, k)).collect()
    }

    pub fn trace(&self) -> f64 {
        (0..self.m).map(|k| self.get(k, k)).sum()
    }

    /// Mass of true class `i`.
    pub fn row_sum(&self, i: usize) -> f64 {
        self.entries[i * self.m..(i + 1) * self.m].iter().sum()
    }

    /// Mass predicted as class `j`.
    pub fn col_sum(&self, j: usize) -> f64 {
        (0..self.m).map(|i| self.get(i, j)).sum()
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().sum()
    }
}

/// Confusion matrix of `predicted` against the true labels of `set`.
pub fn confusion_from_labels(set: &SampleSet, predicted: &[usize]) -> Result<ConfusionMatrix> {
    if predicted.len() != set.len() {
        return Err(Error::dims("predicted labels", set.len(), predicted.len()));
    }
    let m = set.num_classes();
    let mut counts = alloc::vec![0u64; m * m];
    for (s, &j) in set.samples().iter().zip(predicted) {
        if j >= m {
            return Err(Error::invalid(alloc::format!(
                "predicted label {j} out of range for {m} classes"
            )));
        }
        counts[s.label * m + j] += 1;
    }
    Ok(ConfusionMatrix::from_counts(m, &counts, set.len() as u64))
}

/// Confusion matrix of the weighted-argmax classifier `argmax_k p_k w_k`.
pub fn confusion_from_weights(set: &SampleSet, weights: &[f64]) -> Result<ConfusionMatrix> {
    let m = set.num_classes();
    if weights.len() != m {
        return Err(Error::dims("weights", m, weights.len()));
    }
    let predicted: Vec<usize> = set
        .samples()
        .iter()
        .map(|s| weighted_argmax(&s.prediction, weights))
        .collect();
    confusion_from_labels(set, &predicted)
}
