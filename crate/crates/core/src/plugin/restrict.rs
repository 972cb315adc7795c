use alloc::vec::Vec;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::simplex::{LabeledSample, SampleSet};

/// Relative gap below which the two sides of the restricted rule tie.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// The restricted two-class rule: `k` iff `alpha * p_k > (1 - alpha) * p_ref`.
///
/// The comparison is strict and ties go to the reference class. Sides within
/// a relative [`TIE_TOLERANCE`] count as tied, so ties that are exact in
/// decimal survive rounding. The rule stays monotone in `alpha`.
#[inline]
pub(crate) fn predicts_class(alpha: f64, p_k: f64, p_ref: f64) -> bool {
    alpha * p_k * (1.0 - TIE_TOLERANCE) > (1.0 - alpha) * p_ref * (1.0 + TIE_TOLERANCE)
}

/// Prediction of the restricted classifier for one probability vector.
pub fn restricted_predict(alpha: f64, k: usize, reference: usize, probs: &[f64]) -> Result<usize> {
    check_pair(k, reference, probs.len())?;
    if predicts_class(alpha, probs[k], probs[reference]) {
        Ok(k)
    } else {
        Ok(reference)
    }
}

fn check_pair(k: usize, reference: usize, m: usize) -> Result<()> {
    if k == reference {
        return Err(Error::invalid(alloc::format!(
            "class {k} cannot be paired with itself"
        )));
    }
    if k >= m || reference >= m {
        return Err(Error::invalid(alloc::format!(
            "class pair ({k}, {reference}) out of range for {m} classes"
        )));
    }
    Ok(())
}

/// The samples of a set whose true label is `k` or the reference class,
/// in their original order. May be empty.
#[derive(Debug, Clone)]
pub struct Restriction<'a> {
    k: usize,
    reference: usize,
    num_classes: usize,
    samples: Vec<&'a LabeledSample>,
}

/// Restricts `set` to samples labeled `k` or `reference`.
pub fn restrict_sample(set: &SampleSet, k: usize, reference: usize) -> Result<Restriction<'_>> {
    check_pair(k, reference, set.num_classes())?;
    let samples = set
        .samples()
        .iter()
        .filter(|s| s.label == k || s.label == reference)
        .collect();
    Ok(Restriction {
        k,
        reference,
        num_classes: set.num_classes(),
        samples,
    })
}

impl<'a> Restriction<'a> {
    pub fn class(&self) -> usize {
        self.k
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn samples(&self) -> &[&'a LabeledSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// (number labeled `k`, number labeled reference).
    pub fn label_counts(&self) -> (u64, u64) {
        let k = self.samples.iter().filter(|s| s.label == self.k).count() as u64;
        (k, self.samples.len() as u64 - k)
    }

    /// Samples that put no mass on either class of the pair. They always
    /// fall to the reference class.
    pub fn zero_mass_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.prediction[self.k] == 0.0 && s.prediction[self.reference] == 0.0)
            .count()
    }

    /// Confusion matrix of the restricted classifier at `alpha`, normalized
    /// by the size of the restriction. Rebuilt from scratch in O(n).
    pub fn confusion_at(&self, alpha: f64) -> ConfusionMatrix {
        let m = self.num_classes;
        let mut counts = alloc::vec![0u64; m * m];
        for s in &self.samples {
            let predicted = if predicts_class(alpha, s.prediction[self.k], s.prediction[self.reference]) {
                self.k
            } else {
                self.reference
            };
            counts[s.label * m + predicted] += 1;
        }
        ConfusionMatrix::from_counts(m, &counts, self.samples.len() as u64)
    }

    /// Confusion matrix when `flipped_k` class-`k` samples and `flipped_ref`
    /// reference samples are predicted as `k` and the rest as the reference.
    pub(crate) fn confusion_from_flips(
        &self,
        n_k: u64,
        n_ref: u64,
        flipped_k: u64,
        flipped_ref: u64,
    ) -> ConfusionMatrix {
        let m = self.num_classes;
        let (k, r) = (self.k, self.reference);
        let mut counts = alloc::vec![0u64; m * m];
        counts[k * m + k] = flipped_k;
        counts[k * m + r] = n_k - flipped_k;
        counts[r * m + k] = flipped_ref;
        counts[r * m + r] = n_ref - flipped_ref;
        ConfusionMatrix::from_counts(m, &counts, n_k + n_ref)
    }
}
