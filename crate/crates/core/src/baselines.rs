//! Comparison baselines that see predictions only: the raw argmax and
//! diagonal vector scaling.

use alloc::vec::Vec;

use crate::confusion::confusion_from_labels;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::oracle::softmax;
use crate::simplex::{ProbabilityVector, SampleSet};

/// Probabilities are clamped to at least this before the affine map.
pub const PROBABILITY_FLOOR: f64 = 1e-12;

/// Full-batch gradient descent settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalerConfig {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stops once the Euclidean gradient norm falls below this.
    pub tolerance: f64,
}

impl Default for ScalerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            max_iterations: 2000,
            tolerance: 1e-7,
        }
    }
}

/// `p ↦ softmax(w ⊙ max(p, floor) + c)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorScaler {
    pub diag_weights: Vec<f64>,
    pub bias: Vec<f64>,
    pub config: ScalerConfig,
}

impl VectorScaler {
    /// Identity weights, zero bias.
    pub fn identity(m: usize, config: ScalerConfig) -> Self {
        Self {
            diag_weights: alloc::vec![1.0; m],
            bias: alloc::vec![0.0; m],
            config,
        }
    }

    pub fn new(diag_weights: Vec<f64>, bias: Vec<f64>, config: ScalerConfig) -> Result<Self> {
        if diag_weights.len() < 2 || diag_weights.len() != bias.len() {
            return Err(Error::dims("scaler bias", diag_weights.len(), bias.len()));
        }
        if diag_weights.iter().chain(&bias).any(|v| !v.is_finite()) {
            return Err(Error::invalid("scaler parameters must be finite"));
        }
        Ok(Self {
            diag_weights,
            bias,
            config,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.diag_weights.len()
    }
}

/// Outcome of [`fit_vector_scaler`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerFit {
    pub scaler: VectorScaler,
    pub initial_nll: f64,
    pub final_nll: f64,
    pub iterations: usize,
    /// Fewer samples than classes.
    pub underdetermined: bool,
}

fn logits(p: &[f64], w: &[f64], c: &[f64]) -> Vec<f64> {
    p.iter()
        .zip(w)
        .zip(c)
        .map(|((&p, &w), &c)| w * p.max(PROBABILITY_FLOOR) + c)
        .collect()
}

fn log_sum_exp(z: &[f64]) -> f64 {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + libm::log(z.iter().map(|&v| libm::exp(v - max)).sum::<f64>())
}

/// Mean negative log likelihood of the labels under the scaled predictions.
pub fn nll(set: &SampleSet, w: &[f64], c: &[f64]) -> f64 {
    let total: f64 = set
        .samples()
        .iter()
        .map(|s| {
            let z = logits(&s.prediction, w, c);
            log_sum_exp(&z) - z[s.label]
        })
        .sum();
    total / set.len() as f64
}

/// Gradient of [`nll`] with respect to `(w, c)`.
pub fn nll_gradient(set: &SampleSet, w: &[f64], c: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = w.len();
    let mut gw = alloc::vec![0.0; m];
    let mut gc = alloc::vec![0.0; m];
    for s in set.samples() {
        let q = softmax(&logits(&s.prediction, w, c));
        for j in 0..m {
            let dz = q[j] - if j == s.label { 1.0 } else { 0.0 };
            gw[j] += dz * s.prediction[j].max(PROBABILITY_FLOOR);
            gc[j] += dz;
        }
    }
    let n = set.len() as f64;
    gw.iter_mut().chain(gc.iter_mut()).for_each(|g| *g /= n);
    (gw, gc)
}

/// Minimizes [`nll`] by full-batch gradient descent from the identity map.
pub fn fit_vector_scaler(set: &SampleSet, config: ScalerConfig) -> Result<ScalerFit> {
    if !(config.learning_rate > 0.0 && config.learning_rate.is_finite()) {
        return Err(Error::invalid("learning rate must be positive"));
    }
    let m = set.num_classes();
    let mut scaler = VectorScaler::identity(m, config);
    let initial_nll = nll(set, &scaler.diag_weights, &scaler.bias);
    let mut iterations = 0;
    while iterations < config.max_iterations {
        let (gw, gc) = nll_gradient(set, &scaler.diag_weights, &scaler.bias);
        let norm = libm::sqrt(gw.iter().chain(&gc).map(|g| g * g).sum::<f64>());
        if norm < config.tolerance {
            break;
        }
        for (p, g) in scaler.diag_weights.iter_mut().zip(&gw) {
            *p -= config.learning_rate * g;
        }
        for (p, g) in scaler.bias.iter_mut().zip(&gc) {
            *p -= config.learning_rate * g;
        }
        iterations += 1;
    }
    let final_nll = nll(set, &scaler.diag_weights, &scaler.bias);
    if !final_nll.is_finite() {
        return Err(Error::NumericalDomain(alloc::format!(
            "vector scaling diverged (NLL {final_nll})"
        )));
    }
    Ok(ScalerFit {
        scaler,
        initial_nll,
        final_nll,
        iterations,
        underdetermined: set.len() < m,
    })
}

/// Rescales one prediction.
pub fn apply_vector_scaler(probs: &[f64], scaler: &VectorScaler) -> Result<ProbabilityVector> {
    if probs.len() != scaler.num_classes() {
        return Err(Error::dims("prediction", scaler.num_classes(), probs.len()));
    }
    ProbabilityVector::new(softmax(&logits(probs, &scaler.diag_weights, &scaler.bias)))
}

/// Rescales every prediction of a set, keeping ids and labels.
pub fn apply_vector_scaler_set(set: &SampleSet, scaler: &VectorScaler) -> Result<SampleSet> {
    let samples = set
        .samples()
        .iter()
        .map(|s| {
            let mut out = s.clone();
            out.prediction = apply_vector_scaler(&s.prediction, scaler)?;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(samples)
}

/// Metric of the raw argmax predictions.
pub fn clean_eval(set: &SampleSet, metric: &dyn Metric) -> Result<f64> {
    metric.evaluate(&confusion_from_labels(set, &set.argmax_predictions())?)
}
