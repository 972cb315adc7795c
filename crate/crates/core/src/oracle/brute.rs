use alloc::vec::Vec;

use crate::confusion::confusion_from_weights;
use crate::error::{Error, Result};
use crate::metrics::Metric;
use crate::plugin::{normalize_weights, relative_weight, AlphaGrid};
use crate::simplex::SampleSet;

/// Default cap on the number of grid points.
pub const DEFAULT_MAX_POINTS: u128 = 1_000_000;

/// Values taken by each free (non-reference) coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridAxis {
    /// `{0, ε, 2ε, ..., 1}`: `ceil(1/ε) + 1` values in the unit box.
    UnitBox,
    /// The plugin's relative weights `α / (1 - α)` over its α grid with
    /// `ρ = ε`, so every plugin output is a grid point.
    PluginMatched,
}

/// An exhaustive grid over weight vectors with the reference entry fixed at
/// one before normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub epsilon: f64,
    pub num_classes: usize,
    pub max_points: u128,
    pub axis: GridAxis,
    /// Defaults to the last class.
    pub reference_class: Option<usize>,
}

impl GridSpec {
    /// Unit-box grid with the default cap.
    pub fn new(epsilon: f64, num_classes: usize) -> Self {
        Self {
            epsilon,
            num_classes,
            max_points: DEFAULT_MAX_POINTS,
            axis: GridAxis::UnitBox,
            reference_class: None,
        }
    }

    /// Grid containing every weight vector the plugin can return at `ε`.
    pub fn plugin_matched(epsilon: f64, num_classes: usize) -> Self {
        Self {
            axis: GridAxis::PluginMatched,
            ..Self::new(epsilon, num_classes)
        }
    }

    pub fn with_max_points(mut self, max_points: u128) -> Self {
        self.max_points = max_points;
        self
    }

    fn reference(&self) -> usize {
        self.reference_class.unwrap_or(self.num_classes.saturating_sub(1))
    }

    /// Values of one free coordinate.
    pub fn axis_values(&self) -> Result<Vec<f64>> {
        match self.axis {
            GridAxis::UnitBox => {
                if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
                    return Err(Error::invalid(alloc::format!(
                        "grid step must lie in (0, 1], got {}",
                        self.epsilon
                    )));
                }
                let steps = libm::ceil(1.0 / self.epsilon * (1.0 - 1e-9));
                if steps > u32::MAX as f64 {
                    return Err(Error::ResourceLimit {
                        requested: u128::MAX,
                        cap: self.max_points,
                    });
                }
                let steps = steps as usize;
                Ok((0..=steps)
                    .map(|i| (i as f64 * self.epsilon).min(1.0))
                    .collect())
            }
            GridAxis::PluginMatched => {
                let grid = AlphaGrid::new(self.epsilon, self.epsilon)?;
                Ok(grid.iter().map(relative_weight).collect())
            }
        }
    }

    /// Number of grid points, saturating at `u128::MAX`.
    pub fn size(&self) -> Result<u128> {
        if self.num_classes < 2 {
            return Err(Error::invalid("grid needs at least 2 classes"));
        }
        let per_axis = self.axis_values()?.len() as u128;
        Ok((1..self.num_classes).fold(1u128, |acc, _| acc.saturating_mul(per_axis)))
    }
}

/// Best grid point found by [`brute_force_fit`].
#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceResult {
    /// Normalized to unit sum.
    pub weights: Vec<f64>,
    pub value: f64,
    pub evaluations: u64,
}

/// Weights for grid point `index`; free coordinates in ascending class
/// order, the first varying slowest, so index order is lexicographic.
fn point(index: u128, axis: &[f64], m: usize, reference: usize) -> Vec<f64> {
    let base = axis.len() as u128;
    let mut raw = alloc::vec![1.0; m];
    let mut rest = index;
    for k in (0..m).rev().filter(|&k| k != reference) {
        raw[k] = axis[(rest % base) as usize];
        rest /= base;
    }
    normalize_weights(&raw)
}

fn evaluate_point(
    set: &SampleSet,
    metric: &dyn Metric,
    axis: &[f64],
    reference: usize,
    index: u128,
) -> Result<(f64, u128)> {
    let w = point(index, axis, set.num_classes(), reference);
    let v = metric.evaluate(&confusion_from_weights(set, &w)?)?;
    if v.is_nan() {
        return Err(Error::NumericalDomain(alloc::format!(
            "metric {} returned NaN",
            metric.name()
        )));
    }
    Ok((v, index))
}

/// Larger value wins; equal values go to the smaller index.
fn better(a: (f64, u128), b: (f64, u128)) -> (f64, u128) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}

#[cfg(feature = "parallel")]
fn search(
    set: &SampleSet,
    metric: &dyn Metric,
    axis: &[f64],
    reference: usize,
    size: u64,
) -> Result<(f64, u128)> {
    use rayon::prelude::*;
    (0..size)
        .into_par_iter()
        .map(|i| evaluate_point(set, metric, axis, reference, i as u128))
        .try_reduce_with(|a, b| Ok(better(a, b)))
        .expect("grid is non-empty")
}

#[cfg(not(feature = "parallel"))]
fn search(
    set: &SampleSet,
    metric: &dyn Metric,
    axis: &[f64],
    reference: usize,
    size: u64,
) -> Result<(f64, u128)> {
    let mut best = evaluate_point(set, metric, axis, reference, 0)?;
    for i in 1..size {
        best = better(best, evaluate_point(set, metric, axis, reference, i as u128)?);
    }
    Ok(best)
}

/// Evaluates the metric at every grid weight vector and returns the best,
/// ties going to the lexicographically smallest point.
pub fn brute_force_fit(
    set: &SampleSet,
    metric: &dyn Metric,
    grid: &GridSpec,
) -> Result<BruteForceResult> {
    let m = set.num_classes();
    if grid.num_classes != m {
        return Err(Error::dims("grid classes", m, grid.num_classes));
    }
    let reference = grid.reference();
    if reference >= m {
        return Err(Error::invalid(alloc::format!(
            "reference class {reference} out of range for {m} classes"
        )));
    }
    let size = grid.size()?;
    if size > grid.max_points {
        return Err(Error::ResourceLimit {
            requested: size,
            cap: grid.max_points,
        });
    }
    let axis = grid.axis_values()?;
    let (value, index) = search(set, metric, &axis, reference, size as u64)?;
    Ok(BruteForceResult {
        weights: point(index, &axis, m, reference),
        value,
        evaluations: size as u64,
    })
}
