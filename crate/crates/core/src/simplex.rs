//! Probability vectors, labeled samples and validation sets.

use alloc::vec::Vec;
use core::ops::Deref;

use crate::error::{Error, Result};

/// Absolute tolerance on `sum(p) == 1` accepted at ingestion.
pub const SIMPLEX_TOLERANCE: f64 = 1e-6;

/// A point on the probability simplex: one black-box prediction `b(x)`.
///
/// Vectors whose sum is within [`SIMPLEX_TOLERANCE`] of one are renormalized
/// on construction, unless already within `m` ulps of one; anything further
/// off is rejected.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityVector(Vec<f64>);

impl ProbabilityVector {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(Error::invalid("probability vector needs at least 2 classes"));
        }
        let mut sum = 0.0;
        for (k, &p) in probs.iter().enumerate() {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::invalid(alloc::format!(
                    "probability for class {k} is {p}, expected a finite value >= 0"
                )));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > SIMPLEX_TOLERANCE {
            return Err(Error::invalid(alloc::format!(
                "probabilities sum to {sum}, outside 1 +/- {SIMPLEX_TOLERANCE}"
            )));
        }
        let mut probs = probs;
        // Sums within summation rounding are left alone so that renormalized
        // vectors are fixed points.
        if (sum - 1.0).abs() > probs.len() as f64 * f64::EPSILON {
            for p in &mut probs {
                *p /= sum;
            }
        }
        Ok(Self(probs))
    }

    /// Number of classes `m`.
    pub fn num_classes(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// Index of the largest entry, smallest index on ties.
    pub fn argmax(&self) -> usize {
        argmax(&self.0)
    }
}

impl Deref for ProbabilityVector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

/// Index of the largest value; ties go to the smallest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = k;
        }
    }
    best
}

/// Index of the largest `p_k * w_k`; ties go to the smallest index.
pub(crate) fn weighted_argmax(probs: &[f64], weights: &[f64]) -> usize {
    let mut best = 0;
    let mut best_score = probs[0] * weights[0];
    for k in 1..probs.len() {
        let score = probs[k] * weights[k];
        if score > best_score {
            best = k;
            best_score = score;
        }
    }
    best
}

/// One `(b(x_i), y_i)` pair.
///
/// `id` is a stable identifier (the row index at ingestion) used to key
/// per-sample randomness, so transforms do not depend on sample order.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub id: u64,
    pub prediction: ProbabilityVector,
    pub label: usize,
}

impl LabeledSample {
    pub fn new(id: u64, prediction: ProbabilityVector, label: usize) -> Result<Self> {
        if label >= prediction.num_classes() {
            return Err(Error::invalid(alloc::format!(
                "label {label} out of range for {} classes",
                prediction.num_classes()
            )));
        }
        Ok(Self {
            id,
            prediction,
            label,
        })
    }
}

/// A non-empty validation set sharing one class count.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    samples: Vec<LabeledSample>,
    num_classes: usize,
    class_counts: Vec<usize>,
}

impl SampleSet {
    pub fn new(samples: Vec<LabeledSample>) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::invalid("sample set must contain at least one sample"))?;
        let m = first.prediction.num_classes();
        let mut class_counts = alloc::vec![0usize; m];
        for s in &samples {
            if s.prediction.num_classes() != m {
                return Err(Error::dims("sample prediction", m, s.prediction.num_classes()));
            }
            if s.label >= m {
                return Err(Error::invalid(alloc::format!(
                    "label {} out of range for {m} classes",
                    s.label
                )));
            }
            class_counts[s.label] += 1;
        }
        Ok(Self {
            samples,
            num_classes: m,
            class_counts,
        })
    }

    /// Builds a set from parallel prediction/label sequences, assigning ids
    /// `0..n` in order.
    pub fn from_parts(predictions: Vec<Vec<f64>>, labels: &[usize]) -> Result<Self> {
        if predictions.len() != labels.len() {
            return Err(Error::dims("labels", predictions.len(), labels.len()));
        }
        let samples = predictions
            .into_iter()
            .zip(labels)
            .enumerate()
            .map(|(i, (p, &y))| LabeledSample::new(i as u64, ProbabilityVector::new(p)?, y))
            .collect::<Result<Vec<_>>>()?;
        Self::new(samples)
    }

    pub fn samples(&self) -> &[LabeledSample] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<LabeledSample> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    /// Per-class counts of true labels.
    pub fn class_counts(&self) -> &[usize] {
        &self.class_counts
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> + '_ {
        self.samples.iter().map(|s| s.label)
    }

    /// Raw argmax prediction for every sample.
    pub fn argmax_predictions(&self) -> Vec<usize> {
        self.samples.iter().map(|s| s.prediction.argmax()).collect()
    }
}

/// Per-class support of the predictions in a sample set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssumptionReport {
    /// `per_class[k]` is true when some sample gives class `k` positive mass.
    pub per_class: Vec<bool>,
    pub all_classes_supported: bool,
}

impl AssumptionReport {
    pub fn unsupported_classes(&self) -> impl Iterator<Item = usize> + '_ {
        self.per_class
            .iter()
            .enumerate()
            .filter(|(_, &ok)| !ok)
            .map(|(k, _)| k)
    }
}

/// Reports, per class, whether any prediction puts positive mass on it.
///
/// Unsupported classes are only reported; dropping them is up to the caller.
pub fn validate_assumption(set: &SampleSet) -> AssumptionReport {
    let mut per_class = alloc::vec![false; set.num_classes()];
    for s in set.samples() {
        for (k, &p) in s.prediction.iter().enumerate() {
            if p > 0.0 {
                per_class[k] = true;
            }
        }
    }
    let all_classes_supported = per_class.iter().all(|&ok| ok);
    AssumptionReport {
        per_class,
        all_classes_supported,
    }
}
