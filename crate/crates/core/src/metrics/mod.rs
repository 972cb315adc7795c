//! Queryable confusion-matrix metrics.
//!
//! Every metric maps a [`ConfusionMatrix`] to a finite value `>= 0`, larger
//! is better. Macro-averaged metrics average over the classes that occur in
//! the matrix, i.e. that have true mass or predicted mass; a class that is
//! absent from both does not enter the average. Per-class ratios with a zero
//! denominator contribute 0.

use alloc::boxed::Box;
use alloc::string::String;
use core::sync::atomic::{AtomicU64, Ordering};

use crate::confusion::ConfusionMatrix;
use crate::error::Result;

mod formulas;
mod linear;
mod registry;

pub use formulas::{
    accuracy, f_measure_binary, f_measure_macro, fowlkes_mallows_macro, g_mean_macro, mcc,
    mcc_raw,
};
pub use linear::{LinearDiagonalMetric, LinearFractionalMetric};
pub use registry::{lookup, parse_metric_spec, BuiltinMetric, METRIC_NAMES};

/// A black-box metric of the confusion matrix.
pub trait Metric: Sync {
    /// Identifier, including parameters for parametric families.
    fn name(&self) -> String;

    fn evaluate(&self, confusion: &ConfusionMatrix) -> Result<f64>;

    /// Whether the restricted two-class objective is known to be unimodal in
    /// the search parameter, which licenses the logarithmic search.
    fn quasi_concave_pairwise(&self) -> bool {
        false
    }
}

impl<M: Metric + ?Sized> Metric for &M {
    fn name(&self) -> String {
        (**self).name()
    }
    fn evaluate(&self, confusion: &ConfusionMatrix) -> Result<f64> {
        (**self).evaluate(confusion)
    }
    fn quasi_concave_pairwise(&self) -> bool {
        (**self).quasi_concave_pairwise()
    }
}

impl<M: Metric + ?Sized + Send> Metric for Box<M> {
    fn name(&self) -> String {
        (**self).name()
    }
    fn evaluate(&self, confusion: &ConfusionMatrix) -> Result<f64> {
        (**self).evaluate(confusion)
    }
    fn quasi_concave_pairwise(&self) -> bool {
        (**self).quasi_concave_pairwise()
    }
}

/// Wraps a metric and counts evaluations.
///
/// Values are passed through unchanged. The counter is atomic so that
/// parallel searches can share one instance.
#[derive(Debug)]
pub struct CountingMetric<M> {
    inner: M,
    count: AtomicU64,
}

impl<M: Metric> CountingMetric<M> {
    pub fn new(inner: M) -> Self {
        Self {
            inner,
            count: AtomicU64::new(0),
        }
    }

    pub fn evaluations(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    pub fn into_inner(self) -> M {
        self.inner
    }
}

impl<M: Metric> Metric for CountingMetric<M> {
    fn name(&self) -> String {
        self.inner.name()
    }

    fn evaluate(&self, confusion: &ConfusionMatrix) -> Result<f64> {
        self.count.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(confusion)
    }

    fn quasi_concave_pairwise(&self) -> bool {
        self.inner.quasi_concave_pairwise()
    }
}
