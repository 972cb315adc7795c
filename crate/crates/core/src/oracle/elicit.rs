use alloc::vec::Vec;

use crate::confusion::confusion_from_weights;
use crate::error::{Error, Result};
use crate::metrics::{BuiltinMetric, CountingMetric, LinearDiagonalMetric, Metric};
use crate::plugin::{fit, FitConfig, SearchMode};
use crate::simplex::SampleSet;

use super::brute::{brute_force_fit, GridSpec};
use super::eta::{EtaConfig, EtaSampler};

/// Inputs to [`elicit`].
#[derive(Debug, Clone, PartialEq)]
pub struct ElicitConfig {
    pub n: usize,
    pub epsilon: f64,
    /// Failure probability in the finite-sample bound.
    pub delta: f64,
    pub seed: u64,
    /// Generator shape; `num_classes` is overwritten with the length of β.
    pub eta: EtaConfig,
}

impl ElicitConfig {
    pub fn new(n: usize, epsilon: f64, delta: f64, seed: u64) -> Self {
        Self {
            n,
            epsilon,
            delta,
            seed,
            eta: EtaConfig::new(2),
        }
    }
}

/// Recovered weights against the hidden coefficients, with the bound
/// `2 m γ / (1 - ρ)²` evaluated at constant `C = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ElicitationReport {
    pub beta_true: Vec<f64>,
    pub w_recovered: Vec<f64>,
    /// `‖β - w‖₁`.
    pub l1_error: f64,
    pub n: usize,
    pub delta: f64,
    pub epsilon: f64,
    /// `min_k β_ref / (β_ref + β_k)` with the last class as reference.
    pub rho: f64,
    /// `sqrt(ln(1/δ) / n) + ε / 2`.
    pub gamma: f64,
    pub bound_rhs: f64,
    /// Advisory only: the bound holds up to an unknown constant.
    pub within_bound: bool,
    /// Metric queries spent by the fit.
    pub metric_queries: u64,
}

/// `min_k β_ref / (β_ref + β_k)` over `k != ref`, the reference being last.
pub fn consistency_rho(beta: &[f64]) -> Result<f64> {
    let reference = *beta
        .last()
        .ok_or_else(|| Error::invalid("coefficients must not be empty"))?;
    if reference <= 0.0 {
        return Err(Error::invalid(
            "the reference (last) coefficient must be positive",
        ));
    }
    Ok(beta[..beta.len() - 1]
        .iter()
        .map(|b| reference / (reference + b))
        .fold(1.0, f64::min))
}

/// Recovers the coefficients of a hidden linear-diagonal metric by fitting
/// class weights on `n` draws from the synthetic ground truth, querying the
/// metric only through [`Metric::evaluate`].
pub fn elicit(beta: &LinearDiagonalMetric, config: &ElicitConfig) -> Result<ElicitationReport> {
    let m = beta.num_classes();
    let rho = consistency_rho(beta.beta())?;
    if config.n == 0 {
        return Err(Error::invalid("n must be positive"));
    }
    if !(config.delta > 0.0 && config.delta < 1.0) {
        return Err(Error::invalid(alloc::format!(
            "delta must lie in (0, 1), got {}",
            config.delta
        )));
    }
    let eta = EtaConfig {
        num_classes: m,
        ..config.eta.clone()
    };
    let set = EtaSampler::new(config.seed, eta)?.sample_set(config.n)?;

    let oracle = CountingMetric::new(BuiltinMetric::LinearDiag(beta.clone()));
    let fit_config = FitConfig {
        epsilon: config.epsilon,
        rho: Some(rho),
        search: SearchMode::Line,
        ..FitConfig::default()
    };
    let report = fit(&set, &oracle, &fit_config)?;
    let w = report.weights.weights().to_vec();

    let l1_error = beta.beta().iter().zip(&w).map(|(b, x)| libm::fabs(b - x)).sum();
    let gamma = libm::sqrt(libm::log(1.0 / config.delta) / config.n as f64) + config.epsilon / 2.0;
    let bound_rhs = 2.0 * m as f64 * gamma / ((1.0 - rho) * (1.0 - rho));
    Ok(ElicitationReport {
        beta_true: beta.beta().to_vec(),
        w_recovered: w,
        l1_error,
        n: config.n,
        delta: config.delta,
        epsilon: config.epsilon,
        rho,
        gamma,
        bound_rhs,
        within_bound: l1_error <= bound_rhs,
        metric_queries: oracle.evaluations(),
    })
}

/// Metric values of the plugin fit and of the exhaustive grid on one set.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleComparison {
    pub plugin_value: f64,
    pub brute_value: f64,
    /// `brute_value - plugin_value`.
    pub gap: f64,
    pub plugin_weights: Vec<f64>,
    pub brute_weights: Vec<f64>,
}

/// Fits by line search with `ρ = ε` and by brute force on the matching
/// grid, then scores both weight vectors on `set`.
pub fn compare_to_oracle(
    set: &SampleSet,
    metric: &dyn Metric,
    epsilon: f64,
) -> Result<OracleComparison> {
    let config = FitConfig {
        epsilon,
        search: SearchMode::Line,
        ..FitConfig::default()
    };
    let plugin = fit(set, metric, &config)?;
    let plugin_weights = plugin.weights.weights().to_vec();
    let plugin_value = metric.evaluate(&confusion_from_weights(set, &plugin_weights)?)?;
    let brute = brute_force_fit(set, metric, &GridSpec::plugin_matched(epsilon, set.num_classes()))?;
    Ok(OracleComparison {
        plugin_value,
        brute_value: brute.value,
        gap: brute.value - plugin_value,
        plugin_weights,
        brute_weights: brute.weights,
    })
}
