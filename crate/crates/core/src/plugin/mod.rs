//! Coordinate-wise class reweighting.
//!
//! Every class `k` other than the reference is tuned against the reference
//! alone: on the samples labeled `k` or the reference, a threshold `α_k` is
//! searched for the restricted two-class rule, and its odds `α_k / (1 - α_k)`
//! become the relative weight of `k`. Inference is the weighted argmax.

mod restrict;
mod search;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

pub use restrict::{restrict_sample, restricted_predict, Restriction, TIE_TOLERANCE};
pub use search::{
    alpha_line_search, alpha_line_search_naive, alpha_unimodal_search, AlphaGrid, AlphaSearch,
    MAX_GRID_POINTS,
};

use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::simplex::{validate_assumption, weighted_argmax, SampleSet};

/// How each per-pair α is searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SearchMode {
    /// Every grid point.
    Line,
    /// Bisection; requires a pairwise quasi-concave metric.
    Unimodal,
    /// `Unimodal` when the metric is flagged quasi-concave, else `Line`.
    Auto,
}

impl SearchMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SearchMode::Line => "line",
            SearchMode::Unimodal => "unimodal",
            SearchMode::Auto => "auto",
        }
    }

    /// Resolves `Auto` against a metric; never returns `Auto`.
    pub fn resolve(self, metric: &dyn Metric) -> SearchMode {
        match self {
            SearchMode::Auto if metric.quasi_concave_pairwise() => SearchMode::Unimodal,
            SearchMode::Auto => SearchMode::Line,
            other => other,
        }
    }
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SearchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "line" => Ok(SearchMode::Line),
            "unimodal" => Ok(SearchMode::Unimodal),
            "auto" => Ok(SearchMode::Auto),
            other => Err(Error::Parse(alloc::format!(
                "unknown search mode `{other}` (expected line, unimodal or auto)"
            ))),
        }
    }
}

/// Fitting parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Grid step for α.
    pub epsilon: f64,
    /// Upper cutoff margin; α is searched in `[0, 1 - ρ]`. Defaults to ε.
    pub rho: Option<f64>,
    /// Defaults to the last class.
    pub reference_class: Option<usize>,
    pub search: SearchMode,
    /// Runs the per-pair searches on the rayon pool when the `parallel`
    /// feature is enabled; ignored otherwise.
    pub parallel: bool,
    /// Visits classes in descending order. Output is identical either way.
    pub reverse_order: bool,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            epsilon: 0.01,
            rho: None,
            reference_class: None,
            search: SearchMode::Auto,
            parallel: false,
            reverse_order: false,
        }
    }
}

impl FitConfig {
    pub fn with_epsilon(epsilon: f64) -> Self {
        Self {
            epsilon,
            ..Self::default()
        }
    }

    pub fn rho(&self) -> f64 {
        self.rho.unwrap_or(self.epsilon)
    }
}

/// Fitted class weights: non-negative, summing to one, with a strictly
/// positive reference entry.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: Vec<f64>,
    reference_class: usize,
    metric_name: String,
    epsilon: f64,
    rho: f64,
    search_mode: SearchMode,
}

impl WeightVector {
    /// Validates externally supplied weights. They need not sum to one.
    pub fn new(
        weights: Vec<f64>,
        reference_class: usize,
        metric_name: String,
        epsilon: f64,
        rho: f64,
        search_mode: SearchMode,
    ) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::invalid("weight vector needs at least 2 classes"));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::invalid("weights must be finite and >= 0"));
        }
        if reference_class >= weights.len() {
            return Err(Error::invalid(alloc::format!(
                "reference class {reference_class} out of range for {} classes",
                weights.len()
            )));
        }
        if weights[reference_class] <= 0.0 {
            return Err(Error::invalid("reference class weight must be positive"));
        }
        Ok(Self {
            weights,
            reference_class,
            metric_name,
            epsilon,
            rho,
            search_mode,
        })
    }

    /// Equal weights with the last class as reference.
    pub fn uniform(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::invalid("weight vector needs at least 2 classes"));
        }
        Self::new(
            alloc::vec![1.0 / m as f64; m],
            m - 1,
            String::from("uniform"),
            0.0,
            0.0,
            SearchMode::Line,
        )
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn reference_class(&self) -> usize {
        self.reference_class
    }

    pub fn metric_name(&self) -> &str {
        &self.metric_name
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// The resolved mode used during fitting (never `Auto` after `fit`).
    pub fn search_mode(&self) -> SearchMode {
        self.search_mode
    }

    /// Weighted argmax, see [`apply`].
    pub fn predict(&self, probs: &[f64]) -> Result<usize> {
        apply(probs, self)
    }
}

/// Relative weight of a class whose threshold is `alpha`: `α / (1 - α)`.
pub fn relative_weight(alpha: f64) -> f64 {
    alpha / (1.0 - alpha)
}

/// Scales to unit sum, summing in index order.
pub fn normalize_weights(raw: &[f64]) -> Vec<f64> {
    let total: f64 = raw.iter().sum();
    raw.iter().map(|w| w / total).collect()
}

/// Weighted argmax `argmax_k p_k w_k`; ties go to the smallest index.
pub fn apply(probs: &[f64], w: &WeightVector) -> Result<usize> {
    if probs.len() != w.num_classes() {
        return Err(Error::dims("prediction", w.num_classes(), probs.len()));
    }
    Ok(weighted_argmax(probs, &w.weights))
}

/// Something worth surfacing from a fit that did not prevent it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FitWarning {
    /// No prediction gives this class positive mass.
    UnsupportedClass { class: usize },
    /// No sample is labeled `class` or the reference; its weight stays at
    /// the reference value.
    EmptyRestriction { class: usize },
    /// Restricted samples with zero mass on both classes of the pair; they
    /// are kept and always predicted as the reference.
    ZeroPairMass { class: usize, count: usize },
}

impl fmt::Display for FitWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitWarning::UnsupportedClass { class } => {
                write!(f, "class {class} has zero predicted probability on every sample")
            }
            FitWarning::EmptyRestriction { class } => write!(
                f,
                "no samples labeled {class} or the reference class; weight left equal to the reference"
            ),
            FitWarning::ZeroPairMass { class, count } => write!(
                f,
                "{count} samples put zero mass on class {class} and the reference class"
            ),
        }
    }
}

/// Search outcome for one class against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct PairReport {
    pub class: usize,
    /// `None` when the restriction was empty.
    pub alpha: Option<f64>,
    /// Metric value on the restriction at `alpha`.
    pub value: Option<f64>,
    pub evaluations: u64,
    /// Size of the restriction to `class` and the reference.
    pub pair_size: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub weights: WeightVector,
    /// One entry per non-reference class, in ascending class order.
    pub pairs: Vec<PairReport>,
    pub metric_evaluations: u64,
    pub warnings: Vec<FitWarning>,
}

impl FitReport {
    pub fn per_class_alpha(&self) -> impl Iterator<Item = (usize, Option<f64>)> + '_ {
        self.pairs.iter().map(|p| (p.class, p.alpha))
    }

    pub fn per_class_pair_sizes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|p| (p.class, p.pair_size))
    }
}

struct PairOutcome {
    report: PairReport,
    zero_mass: usize,
}

fn fit_pair(
    set: &SampleSet,
    metric: &dyn Metric,
    grid: &AlphaGrid,
    mode: SearchMode,
    k: usize,
    reference: usize,
) -> Result<PairOutcome> {
    let r = restrict_sample(set, k, reference)?;
    let zero_mass = r.zero_mass_count();
    let searched = match mode {
        SearchMode::Unimodal => alpha_unimodal_search(&r, metric, grid),
        _ => alpha_line_search(&r, metric, grid),
    };
    let report = match searched {
        Ok(s) => PairReport {
            class: k,
            alpha: Some(s.alpha),
            value: Some(s.value),
            evaluations: s.evaluations,
            pair_size: r.len(),
        },
        Err(Error::Degenerate(_)) => PairReport {
            class: k,
            alpha: None,
            value: None,
            evaluations: 0,
            pair_size: 0,
        },
        Err(e) => return Err(e),
    };
    Ok(PairOutcome { report, zero_mass })
}

#[cfg(feature = "parallel")]
fn run_pairs<F>(classes: &[usize], parallel: bool, f: F) -> Vec<Result<PairOutcome>>
where
    F: Fn(usize) -> Result<PairOutcome> + Sync,
{
    use rayon::prelude::*;
    if parallel {
        classes.par_iter().map(|&k| f(k)).collect()
    } else {
        classes.iter().map(|&k| f(k)).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn run_pairs<F>(classes: &[usize], _parallel: bool, f: F) -> Vec<Result<PairOutcome>>
where
    F: Fn(usize) -> Result<PairOutcome> + Sync,
{
    classes.iter().map(|&k| f(k)).collect()
}

/// Fits one weight per class against the reference class.
///
/// Pairs are independent: the result does not depend on visiting order or
/// on `parallel`. An empty pair restriction leaves that class at the
/// reference weight and records a warning.
pub fn fit(set: &SampleSet, metric: &dyn Metric, config: &FitConfig) -> Result<FitReport> {
    let m = set.num_classes();
    let rho = config.rho();
    let grid = AlphaGrid::new(config.epsilon, rho)?;
    let reference = config.reference_class.unwrap_or(m - 1);
    if reference >= m {
        return Err(Error::invalid(alloc::format!(
            "reference class {reference} out of range for {m} classes"
        )));
    }
    let mode = config.search.resolve(metric);
    if mode == SearchMode::Unimodal && !metric.quasi_concave_pairwise() {
        return Err(Error::Precondition(alloc::format!(
            "metric {} is not flagged pairwise quasi-concave; use line search",
            metric.name()
        )));
    }

    let mut classes: Vec<usize> = (0..m).filter(|&k| k != reference).collect();
    if config.reverse_order {
        classes.reverse();
    }
    let outcomes = run_pairs(&classes, config.parallel, |k| {
        fit_pair(set, metric, &grid, mode, k, reference)
    });

    let mut slots: Vec<Option<PairOutcome>> = (0..m).map(|_| None).collect();
    for (k, outcome) in classes.iter().zip(outcomes) {
        slots[*k] = Some(outcome?);
    }

    let mut warnings: Vec<FitWarning> = validate_assumption(set)
        .unsupported_classes()
        .map(|class| FitWarning::UnsupportedClass { class })
        .collect();
    let mut raw = alloc::vec![1.0; m];
    let mut pairs = Vec::with_capacity(m - 1);
    let mut metric_evaluations = 0;
    for (k, slot) in slots.into_iter().enumerate() {
        let Some(outcome) = slot else { continue };
        match outcome.report.alpha {
            Some(alpha) => raw[k] = relative_weight(alpha),
            None => warnings.push(FitWarning::EmptyRestriction { class: k }),
        }
        if outcome.zero_mass > 0 {
            warnings.push(FitWarning::ZeroPairMass {
                class: k,
                count: outcome.zero_mass,
            });
        }
        metric_evaluations += outcome.report.evaluations;
        pairs.push(outcome.report);
    }

    let weights = WeightVector::new(
        normalize_weights(&raw),
        reference,
        metric.name(),
        config.epsilon,
        rho,
        mode,
    )?;
    Ok(FitReport {
        weights,
        pairs,
        metric_evaluations,
        warnings,
    })
}
