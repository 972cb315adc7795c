//! Label-shift and label-noise transforms, validation resampling, and the
//! synthetic shifted-benchmark generator.
//!
//! Every random decision about a sample is keyed by `(seed, sample id)`, so
//! results do not depend on sample order or on which other samples are
//! present.

use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::oracle::{softmax, EtaConfig, EtaSampler};
use crate::rng::{keyed_rng, keyed_uniform, Domain};
use crate::simplex::{LabeledSample, ProbabilityVector, SampleSet};

fn check_classes(classes: &[usize], m: usize) -> Result<()> {
    match classes.iter().find(|&&c| c >= m) {
        Some(c) => Err(Error::invalid(alloc::format!(
            "affected class {c} out of range for {m} classes"
        ))),
        None => Ok(()),
    }
}

fn check_fraction(name: &str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::invalid(alloc::format!(
            "{name} must lie in [0, 1], got {value}"
        )))
    }
}

/// Knock-out label shift: samples of the affected classes are deleted
/// independently with probability `deletion_fraction`.
#[derive(Debug, Clone, PartialEq)]
pub struct ShiftSpec {
    pub affected_classes: Vec<usize>,
    pub deletion_fraction: f64,
    pub seed: u64,
}

impl ShiftSpec {
    pub fn new(affected_classes: Vec<usize>, deletion_fraction: f64, seed: u64) -> Result<Self> {
        check_fraction("deletion fraction", deletion_fraction)?;
        Ok(Self {
            affected_classes,
            deletion_fraction,
            seed,
        })
    }
}

/// Symmetric class-dependent noise: labels of the affected classes move,
/// with probability `flip_probability`, to a uniformly chosen other class.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSpec {
    pub affected_classes: Vec<usize>,
    pub flip_probability: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(affected_classes: Vec<usize>, flip_probability: f64, seed: u64) -> Result<Self> {
        check_fraction("flip probability", flip_probability)?;
        Ok(Self {
            affected_classes,
            flip_probability,
            seed,
        })
    }
}

/// Applies knock-out shift. Predictions and ids of survivors are unchanged.
pub fn apply_label_shift(set: &SampleSet, spec: &ShiftSpec) -> Result<SampleSet> {
    check_fraction("deletion fraction", spec.deletion_fraction)?;
    check_classes(&spec.affected_classes, set.num_classes())?;
    let kept: Vec<LabeledSample> = set
        .samples()
        .iter()
        .filter(|s| {
            !spec.affected_classes.contains(&s.label)
                || keyed_uniform(spec.seed, Domain::Shift, s.id) >= spec.deletion_fraction
        })
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(Error::Degenerate(String::from(
            "label shift deleted every sample",
        )));
    }
    SampleSet::new(kept)
}

/// Applies label noise. Predictions and ids are unchanged.
pub fn apply_label_noise(set: &SampleSet, spec: &NoiseSpec) -> Result<SampleSet> {
    check_fraction("flip probability", spec.flip_probability)?;
    let m = set.num_classes();
    check_classes(&spec.affected_classes, m)?;
    let samples = set
        .samples()
        .iter()
        .map(|s| {
            let mut out = s.clone();
            if spec.affected_classes.contains(&s.label) {
                let mut rng = keyed_rng(spec.seed, Domain::Noise, s.id);
                if rng.random::<f64>() < spec.flip_probability {
                    let other = rng.random_range(0..m - 1);
                    out.label = if other >= s.label { other + 1 } else { other };
                }
            }
            out
        })
        .collect();
    SampleSet::new(samples)
}

/// Draws `size` samples from `pool` without replacement for resample
/// `repeat`, keeping pool order. For a fixed `(seed, repeat)`, smaller
/// draws are subsets of larger ones.
pub fn subsample(pool: &SampleSet, size: usize, seed: u64, repeat: u64) -> Result<SampleSet> {
    if size == 0 || size > pool.len() {
        return Err(Error::invalid(alloc::format!(
            "subsample size {size} must lie in [1, {}]",
            pool.len()
        )));
    }
    let key = seed ^ repeat.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let mut keyed: Vec<(f64, usize)> = pool
        .samples()
        .iter()
        .enumerate()
        .map(|(pos, s)| (keyed_uniform(key, Domain::Subsample, s.id), pos))
        .collect();
    keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = keyed[..size].iter().map(|&(_, pos)| pos).collect();
    chosen.sort_unstable();
    SampleSet::new(chosen.into_iter().map(|i| pool.samples()[i].clone()).collect())
}

/// Settings for [`make_shift_benchmark`].
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkConfig {
    pub seed: u64,
    pub num_classes: usize,
    /// Source samples used to estimate the prior baked into the proxy.
    pub n_train_proxy: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// Softmax temperature of the proxy black box.
    pub temperature: f64,
    /// Source logit offset for class `k` is `-imbalance * k`.
    pub imbalance: f64,
    pub eta_scale: f64,
    pub val_shift: Option<ShiftSpec>,
    pub test_shift: Option<ShiftSpec>,
    pub val_noise: Option<NoiseSpec>,
    pub test_noise: Option<NoiseSpec>,
}

impl BenchmarkConfig {
    /// No shift or noise; temperature 2, moderate class imbalance.
    pub fn new(seed: u64, num_classes: usize, n_val: usize, n_test: usize) -> Self {
        Self {
            seed,
            num_classes,
            n_train_proxy: 1_000,
            n_val,
            n_test,
            temperature: 2.0,
            imbalance: 0.5,
            eta_scale: 1.5,
            val_shift: None,
            test_shift: None,
            val_noise: None,
            test_noise: None,
        }
    }

    /// Knock-out shift of `fraction` on `classes` in both validation and
    /// test data.
    pub fn with_shift(mut self, classes: Vec<usize>, fraction: f64) -> Result<Self> {
        self.val_shift = Some(ShiftSpec::new(classes.clone(), fraction, self.seed ^ 0x5A)?);
        self.test_shift = Some(ShiftSpec::new(classes, fraction, self.seed ^ 0xA5)?);
        Ok(self)
    }
}

/// Validation and test sets of proxy predictions with their labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Benchmark {
    pub val: SampleSet,
    pub test: SampleSet,
    /// Smoothed source label frequencies baked into the proxy.
    pub source_prior: Vec<f64>,
}

/// Proxy black box `softmax((ln η + ln π) / T)`: the true posterior tilted
/// once more by the source prior, then flattened by the temperature.
fn proxy(eta: &[f64], prior: &[f64], temperature: f64) -> Vec<f64> {
    let logits: Vec<f64> = eta
        .iter()
        .zip(prior)
        .map(|(&e, &p)| (libm::log(e.max(1e-300)) + libm::log(p)) / temperature)
        .collect();
    softmax(&logits)
}

fn draw_split(
    sampler: &mut EtaSampler,
    n: usize,
    prior: &[f64],
    temperature: f64,
    id_offset: u64,
) -> Result<SampleSet> {
    let samples = (0..n)
        .map(|_| {
            let truth = sampler.draw();
            Ok(LabeledSample {
                id: id_offset + truth.id,
                prediction: ProbabilityVector::new(proxy(&truth.prediction, prior, temperature))?,
                label: truth.label,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SampleSet::new(samples)
}

/// Builds a shifted benchmark: a softmax ground truth over an imbalanced
/// source, a miscalibrated proxy black box, and validation/test splits with
/// the configured shift and noise applied independently to each.
pub fn make_shift_benchmark(config: &BenchmarkConfig) -> Result<Benchmark> {
    let m = config.num_classes;
    if config.n_train_proxy == 0 || config.n_val == 0 || config.n_test == 0 {
        return Err(Error::invalid("benchmark sizes must be positive"));
    }
    if !(config.temperature > 0.0 && config.temperature.is_finite()) {
        return Err(Error::invalid("temperature must be positive"));
    }
    if !config.imbalance.is_finite() {
        return Err(Error::invalid("imbalance must be finite"));
    }
    let eta = EtaConfig {
        num_classes: m,
        latent_dim: m,
        scale: config.eta_scale,
        bias: (0..m).map(|k| -config.imbalance * k as f64).collect(),
    };
    let root = EtaSampler::new(config.seed, eta)?;

    let mut train = root.fork(0);
    let mut counts = alloc::vec![1.0; m];
    for _ in 0..config.n_train_proxy {
        counts[train.draw().label] += 1.0;
    }
    let total: f64 = counts.iter().sum();
    let source_prior: Vec<f64> = counts.iter().map(|c| c / total).collect();

    // Ids are disjoint across splits so keyed transforms stay independent.
    let val_offset = 1u64 << 40;
    let test_offset = 2u64 << 40;
    let mut val = draw_split(&mut root.fork(1), config.n_val, &source_prior, config.temperature, val_offset)?;
    let mut test = draw_split(&mut root.fork(2), config.n_test, &source_prior, config.temperature, test_offset)?;
    if let Some(spec) = &config.val_shift {
        val = apply_label_shift(&val, spec)?;
    }
    if let Some(spec) = &config.test_shift {
        test = apply_label_shift(&test, spec)?;
    }
    if let Some(spec) = &config.val_noise {
        val = apply_label_noise(&val, spec)?;
    }
    if let Some(spec) = &config.test_noise {
        test = apply_label_noise(&test, spec)?;
    }
    Ok(Benchmark {
        val,
        test,
        source_prior,
    })
}
