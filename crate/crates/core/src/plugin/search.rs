use alloc::vec::Vec;

use super::restrict::{predicts_class, Restriction};
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::metrics::Metric;

/// Largest α grid accepted by the searches.
pub const MAX_GRID_POINTS: usize = 1 << 26;

/// The search grid `{0, ε, 2ε, ...} ∩ [0, 1 - ρ]` closed by `1 - ρ`.
///
/// Points are `min(i ε, 1 - ρ)` and there are `ceil((1 - ρ)/ε + 1)` of
/// them, so the last point is always `1 - ρ`. A ratio `(1 - ρ)/ε` within a
/// relative `1e-9` of an integer counts as that integer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaGrid {
    epsilon: f64,
    rho: f64,
    len: usize,
}

impl AlphaGrid {
    pub fn new(epsilon: f64, rho: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::invalid(alloc::format!(
                "epsilon must lie in (0, 1), got {epsilon}"
            )));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::invalid(alloc::format!("rho must lie in (0, 1), got {rho}")));
        }
        let ratio = (1.0 - rho) / epsilon;
        let nearest = libm::round(ratio);
        let steps = if libm::fabs(ratio - nearest) <= 1e-9 * ratio.max(1.0) {
            nearest
        } else {
            libm::ceil(ratio)
        };
        if steps + 1.0 > MAX_GRID_POINTS as f64 {
            return Err(Error::ResourceLimit {
                requested: steps as u128 + 1,
                cap: MAX_GRID_POINTS as u128,
            });
        }
        Ok(Self {
            epsilon,
            rho,
            len: steps as usize + 1,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    /// Number of grid points; at least 1.
    pub fn len(&self) -> usize {
        self.len
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The `i`-th grid point. Strictly increasing in `i` up to the cutoff.
    pub fn alpha(&self, i: usize) -> f64 {
        (i as f64 * self.epsilon).min(1.0 - self.rho)
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(|i| self.alpha(i))
    }
}

/// Outcome of one α search over a restriction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaSearch {
    pub alpha: f64,
    /// Grid index of `alpha`.
    pub index: usize,
    pub value: f64,
    /// Metric evaluations spent.
    pub evaluations: u64,
}

fn evaluate(metric: &dyn Metric, c: &ConfusionMatrix) -> Result<f64> {
    let v = metric.evaluate(c)?;
    if v.is_nan() {
        return Err(Error::NumericalDomain(alloc::format!(
            "metric {} returned NaN",
            metric.name()
        )));
    }
    Ok(v)
}

fn non_empty(r: &Restriction<'_>) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Degenerate(alloc::format!(
            "no samples labeled {} or {}",
            r.class(),
            r.reference()
        )));
    }
    Ok(())
}

/// Reference line search: rebuilds the restricted confusion matrix at every
/// grid point. O(n / ε).
pub fn alpha_line_search_naive(
    r: &Restriction<'_>,
    metric: &dyn Metric,
    grid: &AlphaGrid,
) -> Result<AlphaSearch> {
    non_empty(r)?;
    let mut best: Option<(usize, f64)> = None;
    for i in 0..grid.len() {
        let v = evaluate(metric, &r.confusion_at(grid.alpha(i)))?;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (index, value) = best.expect("grid has at least one point");
    Ok(AlphaSearch {
        alpha: grid.alpha(index),
        index,
        value,
        evaluations: grid.len() as u64,
    })
}

/// First grid index at which the sample is predicted as `k`, or `grid.len()`
/// if it never is. The rule is monotone in α, so bisection is exact.
fn flip_index(grid: &AlphaGrid, p_k: f64, p_ref: f64) -> usize {
    let (mut lo, mut hi) = (0, grid.len());
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if predicts_class(grid.alpha(mid), p_k, p_ref) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Per grid index, how many class-`k` and reference samples first flip to
/// `k` there. Length `grid.len() + 1`; the last slot holds the never-flipping.
struct FlipTable {
    n_k: u64,
    n_ref: u64,
    flips_k: Vec<u64>,
    flips_ref: Vec<u64>,
}

impl FlipTable {
    fn build(r: &Restriction<'_>, grid: &AlphaGrid) -> Self {
        let mut flips_k = alloc::vec![0u64; grid.len() + 1];
        let mut flips_ref = alloc::vec![0u64; grid.len() + 1];
        let (k, reference) = (r.class(), r.reference());
        for s in r.samples() {
            let i = flip_index(grid, s.prediction[k], s.prediction[reference]);
            if s.label == k {
                flips_k[i] += 1;
            } else {
                flips_ref[i] += 1;
            }
        }
        let (n_k, n_ref) = r.label_counts();
        Self {
            n_k,
            n_ref,
            flips_k,
            flips_ref,
        }
    }
}

/// Line search with incremental confusion updates: O(n log(1/ε) + 1/ε)
/// work besides the metric calls. Agrees bit-exactly with
/// [`alpha_line_search_naive`], ties going to the smallest α.
pub fn alpha_line_search(
    r: &Restriction<'_>,
    metric: &dyn Metric,
    grid: &AlphaGrid,
) -> Result<AlphaSearch> {
    non_empty(r)?;
    let table = FlipTable::build(r, grid);
    let (mut cum_k, mut cum_ref) = (0u64, 0u64);
    let mut best: Option<(usize, f64)> = None;
    for i in 0..grid.len() {
        cum_k += table.flips_k[i];
        cum_ref += table.flips_ref[i];
        let c = r.confusion_from_flips(table.n_k, table.n_ref, cum_k, cum_ref);
        let v = evaluate(metric, &c)?;
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    let (index, value) = best.expect("grid has at least one point");
    Ok(AlphaSearch {
        alpha: grid.alpha(index),
        index,
        value,
        evaluations: grid.len() as u64,
    })
}

/// Bisection for quasi-concave metrics.
///
/// The grid is first compressed into segments of constant prediction (one
/// per distinct flip index, plus index 0); adjacent segments differ in at
/// least one prediction. Bisection then finds the first segment that is no
/// worse than its successor, using at most `2 ceil(log2 L)` evaluations for
/// `L` segments (one when `L = 1`). The returned α is the smallest of that
/// segment.
pub fn alpha_unimodal_search(
    r: &Restriction<'_>,
    metric: &dyn Metric,
    grid: &AlphaGrid,
) -> Result<AlphaSearch> {
    if !metric.quasi_concave_pairwise() {
        return Err(Error::Precondition(alloc::format!(
            "metric {} is not flagged pairwise quasi-concave; use line search",
            metric.name()
        )));
    }
    non_empty(r)?;
    let table = FlipTable::build(r, grid);

    // Segment starts with the cumulative flip counts at each start.
    let mut starts: Vec<(usize, u64, u64)> = Vec::new();
    let (mut cum_k, mut cum_ref) = (0u64, 0u64);
    for i in 0..grid.len() {
        cum_k += table.flips_k[i];
        cum_ref += table.flips_ref[i];
        if i == 0 || table.flips_k[i] + table.flips_ref[i] > 0 {
            starts.push((i, cum_k, cum_ref));
        }
    }

    let mut memo: Vec<Option<f64>> = alloc::vec![None; starts.len()];
    let mut evaluations = 0u64;
    let mut value_of = |s: usize| -> Result<f64> {
        if let Some(v) = memo[s] {
            return Ok(v);
        }
        let (_, fk, fr) = starts[s];
        let v = evaluate(metric, &r.confusion_from_flips(table.n_k, table.n_ref, fk, fr))?;
        evaluations += 1;
        memo[s] = Some(v);
        Ok(v)
    };

    let (mut lo, mut hi) = (0, starts.len() - 1);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if value_of(mid)? >= value_of(mid + 1)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let value = value_of(lo)?;
    let index = starts[lo].0;
    Ok(AlphaSearch {
        alpha: grid.alpha(index),
        index,
        value,
        evaluations,
    })
}
