use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::rng::{keyed_rng, Domain};
use crate::simplex::{LabeledSample, ProbabilityVector, SampleSet};

/// Shape of the synthetic ground truth `η(z) = softmax(W z + bias)` with
/// `z ~ N(0, I_d)` and `W_ij ~ N(0, scale²)`.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaConfig {
    pub num_classes: usize,
    pub latent_dim: usize,
    /// Standard deviation of the entries of `W`; 0 gives uniform `η`.
    pub scale: f64,
    /// Per-class logit offset; empty means zeros.
    pub bias: Vec<f64>,
}

impl EtaConfig {
    pub fn new(num_classes: usize) -> Self {
        Self {
            num_classes,
            latent_dim: num_classes,
            scale: 1.5,
            bias: Vec::new(),
        }
    }

    fn validate(&self) -> Result<()> {
        if self.num_classes < 2 {
            return Err(Error::invalid("the generator needs at least 2 classes"));
        }
        if self.latent_dim == 0 {
            return Err(Error::invalid("latent dimension must be positive"));
        }
        if !self.scale.is_finite() || self.scale < 0.0 {
            return Err(Error::invalid("generator scale must be finite and >= 0"));
        }
        if !self.bias.is_empty() && self.bias.len() != self.num_classes {
            return Err(Error::dims("generator bias", self.num_classes, self.bias.len()));
        }
        if self.bias.iter().any(|b| !b.is_finite()) {
            return Err(Error::invalid("generator bias must be finite"));
        }
        Ok(())
    }
}

/// Numerically stable softmax.
pub(crate) fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&l| libm::exp(l - max)).collect();
    let sum: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / sum).collect()
}

/// Index `k` with `cum_{k-1} <= u < cum_k`, skipping zero-mass classes.
pub(crate) fn categorical(probs: &[f64], u: f64) -> usize {
    let mut cum = 0.0;
    let mut last_positive = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            cum += p;
            last_positive = k;
            if u < cum {
                return k;
            }
        }
    }
    last_positive
}

/// Seeded stream of `(η(z), y)` pairs with `y ~ η(z)`. The emitted
/// prediction is `η(z)` itself.
#[derive(Debug, Clone)]
pub struct EtaSampler {
    config: EtaConfig,
    /// Row-major `m × d`.
    layer: Vec<f64>,
    seed: u64,
    rng: ChaCha8Rng,
    next_id: u64,
}

impl EtaSampler {
    pub fn new(seed: u64, config: EtaConfig) -> Result<Self> {
        config.validate()?;
        let mut layer_rng = keyed_rng(seed, Domain::Generator, 0);
        let layer = (0..config.num_classes * config.latent_dim)
            .map(|_| config.scale * layer_rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(Self {
            config,
            layer,
            seed,
            rng: keyed_rng(seed, Domain::Generator, 1),
            next_id: 0,
        })
    }

    /// Same ground truth, independent sample stream `stream`.
    pub fn fork(&self, stream: u64) -> Self {
        Self {
            config: self.config.clone(),
            layer: self.layer.clone(),
            seed: self.seed,
            rng: keyed_rng(self.seed, Domain::Generator, stream.wrapping_add(2)),
            next_id: 0,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.config.num_classes
    }

    pub fn config(&self) -> &EtaConfig {
        &self.config
    }

    /// `η` at latent point `z`.
    pub fn eta(&self, z: &[f64]) -> Vec<f64> {
        let d = self.config.latent_dim;
        let logits: Vec<f64> = (0..self.config.num_classes)
            .map(|k| {
                let row = &self.layer[k * d..(k + 1) * d];
                let dot: f64 = row.iter().zip(z).map(|(w, x)| w * x).sum();
                dot + self.config.bias.get(k).copied().unwrap_or(0.0)
            })
            .collect();
        softmax(&logits)
    }

    /// Draws a fresh latent point and returns its `η`.
    pub fn draw_eta(&mut self) -> Vec<f64> {
        let z: Vec<f64> = (0..self.config.latent_dim)
            .map(|_| self.rng.sample::<f64, _>(StandardNormal))
            .collect();
        self.eta(&z)
    }

    /// Draws `(η, y)`; ids count up from 0.
    pub fn draw(&mut self) -> LabeledSample {
        let eta = self.draw_eta();
        let label = categorical(&eta, self.rng.random::<f64>());
        let id = self.next_id;
        self.next_id += 1;
        let prediction = ProbabilityVector::new(eta).expect("softmax output lies on the simplex");
        LabeledSample {
            id,
            prediction,
            label,
        }
    }

    pub fn sample_set(&mut self, n: usize) -> Result<SampleSet> {
        SampleSet::new((0..n).map(|_| self.draw()).collect())
    }
}

impl Iterator for EtaSampler {
    type Item = LabeledSample;

    fn next(&mut self) -> Option<LabeledSample> {
        Some(self.draw())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn same_seed_same_stream() {
        let a: Vec<_> = EtaSampler::new(5, EtaConfig::new(3)).unwrap().take(50).collect();
        let b: Vec<_> = EtaSampler::new(5, EtaConfig::new(3)).unwrap().take(50).collect();
        assert_eq!(a, b);
        let c: Vec<_> = EtaSampler::new(6, EtaConfig::new(3)).unwrap().take(50).collect();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_layer_gives_uniform_eta_and_labels() {
        let config = EtaConfig {
            scale: 0.0,
            ..EtaConfig::new(4)
        };
        let mut sampler = EtaSampler::new(1, config).unwrap();
        let n = 40_000;
        let mut counts = [0usize; 4];
        for _ in 0..n {
            let s = sampler.draw();
            assert!(s.prediction.iter().all(|&p| p == 0.25));
            counts[s.label] += 1;
        }
        let sigma = libm::sqrt(n as f64 * 0.25 * 0.75);
        for c in counts {
            assert!((c as f64 - n as f64 / 4.0).abs() < 4.0 * sigma, "{counts:?}");
        }
    }

    #[test]
    fn label_marginal_matches_mean_eta() {
        let mut sampler = EtaSampler::new(11, EtaConfig::new(2)).unwrap();
        let mut analytic = sampler.fork(0);
        let n = 100_000;
        let ones = (0..n).filter(|_| sampler.draw().label == 1).count();
        let draws = 1_000_000;
        let mean: f64 = (0..draws).map(|_| analytic.draw_eta()[1]).sum::<f64>() / draws as f64;
        assert!((ones as f64 / n as f64 - mean).abs() < 0.02);
    }

    #[test]
    fn categorical_skips_zero_mass() {
        assert_eq!(categorical(&[0.0, 1.0, 0.0], 0.999_999), 1);
        assert_eq!(categorical(&[0.5, 0.5, 0.0], 0.0), 0);
        assert_eq!(categorical(&[0.5, 0.5, 0.0], 0.5), 1);
        assert_eq!(categorical(&[0.5, 0.5], 1.0 - 1e-17), 1);
    }

    #[test]
    fn config_validation() {
        assert!(EtaSampler::new(0, EtaConfig::new(1)).is_err());
        let bad_bias = EtaConfig {
            bias: vec![0.0; 2],
            ..EtaConfig::new(3)
        };
        assert!(EtaSampler::new(0, bad_bias).is_err());
    }
}
