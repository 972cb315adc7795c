//! Post-hoc reweighting of black-box multiclass predictions.
//!
//! Given a small labeled validation set of probability vectors produced by an
//! opaque classifier, [`plugin::fit`] learns one non-negative weight per class
//! so that `argmax_k p_k * w_k` maximizes a queryable confusion-matrix metric.
//! Each weight is tuned against a fixed reference class by a one-dimensional
//! search over the restricted two-class predictor, so the cost grows linearly
//! in the number of classes instead of exponentially.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. The `parallel` feature runs the per-class searches on rayon.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod baselines;
pub mod confusion;
mod error;
pub mod metrics;
pub mod oracle;
pub mod plugin;
mod rng;
pub mod simplex;
pub mod synth;

pub use confusion::{confusion_from_labels, confusion_from_weights, ConfusionMatrix};
pub use error::{Error, Result};
pub use metrics::{CountingMetric, Metric};
pub use plugin::{apply, fit, FitConfig, FitReport, SearchMode, WeightVector};
pub use simplex::{validate_assumption, LabeledSample, ProbabilityVector, SampleSet};
