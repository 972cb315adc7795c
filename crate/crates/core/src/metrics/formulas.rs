use alloc::vec::Vec;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

// A factor this small under the MCC square root only arises from a single
// non-empty row or column (the smallest genuine value is ~1/n).
const MCC_DEGENERATE: f64 = 1e-12;

#[inline]
fn ratio_or_zero(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

/// Classes with any true or predicted mass.
fn present_classes(c: &ConfusionMatrix) -> Vec<usize> {
    (0..c.num_classes())
        .filter(|&k| c.row_sum(k) > 0.0 || c.col_sum(k) > 0.0)
        .collect()
}

fn off_diagonal_column(c: &ConfusionMatrix, k: usize) -> f64 {
    (0..c.num_classes()).filter(|&j| j != k).map(|j| c.get(j, k)).sum()
}

fn off_diagonal_row(c: &ConfusionMatrix, k: usize) -> f64 {
    (0..c.num_classes()).filter(|&j| j != k).map(|j| c.get(k, j)).sum()
}

fn mean_over_present(c: &ConfusionMatrix, per_class: impl Fn(usize) -> f64) -> f64 {
    let present = present_classes(c);
    if present.is_empty() {
        return 0.0;
    }
    present.iter().map(|&k| per_class(k)).sum::<f64>() / present.len() as f64
}

/// Trace of the confusion matrix.
pub fn accuracy(c: &ConfusionMatrix) -> f64 {
    c.trace()
}

/// Binary F-measure with class 1 as the positive class:
/// `2 C11 / (2 C11 + C01 + C10)`, or 0 when the denominator vanishes.
pub fn f_measure_binary(c: &ConfusionMatrix) -> Result<f64> {
    if c.num_classes() != 2 {
        return Err(Error::dims("binary F-measure classes", 2, c.num_classes()));
    }
    let tp = c.get(1, 1);
    Ok(ratio_or_zero(2.0 * tp, 2.0 * tp + c.get(0, 1) + c.get(1, 0)))
}

fn class_f1(c: &ConfusionMatrix, k: usize) -> f64 {
    let tp = c.get(k, k);
    ratio_or_zero(
        2.0 * tp,
        2.0 * tp + off_diagonal_column(c, k) + off_diagonal_row(c, k),
    )
}

/// Unweighted mean of per-class F1 scores.
pub fn f_measure_macro(c: &ConfusionMatrix) -> f64 {
    mean_over_present(c, |k| class_f1(c, k))
}

fn recall(c: &ConfusionMatrix, k: usize) -> f64 {
    ratio_or_zero(c.get(k, k), c.row_sum(k))
}

fn precision(c: &ConfusionMatrix, k: usize) -> f64 {
    ratio_or_zero(c.get(k, k), c.col_sum(k))
}

/// Geometric mean of per-class recalls; any zero recall gives 0.
pub fn g_mean_macro(c: &ConfusionMatrix) -> f64 {
    let present = present_classes(c);
    if present.is_empty() {
        return 0.0;
    }
    let mut product = 1.0;
    for &k in &present {
        let r = recall(c, k);
        if r == 0.0 {
            return 0.0;
        }
        product *= r;
    }
    libm::pow(product, 1.0 / present.len() as f64)
}

/// Multiclass Matthews correlation in `[-1, 1]`; 0 when either variance
/// factor vanishes.
pub fn mcc_raw(c: &ConfusionMatrix) -> f64 {
    let m = c.num_classes();
    let s = c.total();
    let trace = c.trace();
    let mut pt = 0.0;
    let mut pp = 0.0;
    let mut tt = 0.0;
    for k in 0..m {
        let t = c.row_sum(k);
        let p = c.col_sum(k);
        pt += p * t;
        pp += p * p;
        tt += t * t;
    }
    let pred_factor = s * s - pp;
    let true_factor = s * s - tt;
    if pred_factor <= MCC_DEGENERATE || true_factor <= MCC_DEGENERATE {
        return 0.0;
    }
    (trace * s - pt) / libm::sqrt(pred_factor * true_factor)
}

/// Matthews correlation shifted to `[0, 1]` as `(mcc + 1) / 2`.
pub fn mcc(c: &ConfusionMatrix) -> f64 {
    (mcc_raw(c) + 1.0) / 2.0
}

/// Mean over classes of `sqrt(precision_k * recall_k)`.
pub fn fowlkes_mallows_macro(c: &ConfusionMatrix) -> f64 {
    mean_over_present(c, |k| libm::sqrt(precision(c, k) * recall(c, k)))
}
