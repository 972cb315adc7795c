use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

const COEFFICIENT_SUM_TOLERANCE: f64 = 1e-9;

fn join(values: &[f64]) -> String {
    let mut out = String::new();
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        let _ = write!(out, "{v}");
    }
    out
}

/// `f(C) = sum_i beta_i * C_ii` with `beta >= 0` and `|beta|_1 = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearDiagonalMetric {
    beta: Vec<f64>,
}

impl LinearDiagonalMetric {
    pub fn new(beta: Vec<f64>) -> Result<Self> {
        if beta.len() < 2 {
            return Err(Error::invalid("linear_diag needs at least 2 coefficients"));
        }
        if beta.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::invalid("linear_diag coefficients must be finite and >= 0"));
        }
        let sum: f64 = beta.iter().sum();
        if (sum - 1.0).abs() > COEFFICIENT_SUM_TOLERANCE {
            return Err(Error::invalid(alloc::format!(
                "linear_diag coefficients sum to {sum}, expected 1"
            )));
        }
        Ok(Self { beta })
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn num_classes(&self) -> usize {
        self.beta.len()
    }

    pub fn evaluate(&self, c: &ConfusionMatrix) -> Result<f64> {
        if c.num_classes() != self.beta.len() {
            return Err(Error::dims("linear_diag coefficients", c.num_classes(), self.beta.len()));
        }
        Ok(self
            .beta
            .iter()
            .enumerate()
            .map(|(i, b)| b * c.get(i, i))
            .sum())
    }

    pub fn name(&self) -> String {
        alloc::format!("linear_diag:{}", join(&self.beta))
    }
}

/// `f(C) = (<a, diag C> + b) / (<c, diag C> + d)`.
///
/// The achievable diagonals form the polytope `{x >= 0, sum x <= 1}`, whose
/// vertices are the origin and the unit vectors, so both affine parts are
/// checked there.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFractionalMetric {
    numerator: Vec<f64>,
    numerator_offset: f64,
    denominator: Vec<f64>,
    denominator_offset: f64,
}

fn min_over_vertices(coefficients: &[f64], offset: f64) -> f64 {
    coefficients
        .iter()
        .fold(offset, |acc, &c| acc.min(offset + c))
}

impl LinearFractionalMetric {
    /// Requires a strictly positive denominator and a non-negative numerator
    /// on every achievable diagonal.
    pub fn new(
        numerator: Vec<f64>,
        numerator_offset: f64,
        denominator: Vec<f64>,
        denominator_offset: f64,
    ) -> Result<Self> {
        let metric = Self::new_relaxed(numerator, numerator_offset, denominator, denominator_offset)?;
        let den_min = min_over_vertices(&metric.denominator, metric.denominator_offset);
        if den_min <= 0.0 {
            return Err(Error::NumericalDomain(alloc::format!(
                "linear_frac denominator reaches {den_min} on the diagonal simplex"
            )));
        }
        let num_min = min_over_vertices(&metric.numerator, metric.numerator_offset);
        if num_min < 0.0 {
            return Err(Error::NumericalDomain(alloc::format!(
                "linear_frac numerator reaches {num_min} on the diagonal simplex"
            )));
        }
        Ok(metric)
    }

    /// Skips the vertex checks. Denominator positivity is then only enforced
    /// per evaluation, which lets ratios such as the binary F-measure
    /// `2 C11 / (1 - C00 + C11)` be expressed even though their denominator
    /// vanishes at an unreachable corner.
    pub fn new_relaxed(
        numerator: Vec<f64>,
        numerator_offset: f64,
        denominator: Vec<f64>,
        denominator_offset: f64,
    ) -> Result<Self> {
        if numerator.len() < 2 || numerator.len() != denominator.len() {
            return Err(Error::dims("linear_frac denominator", numerator.len(), denominator.len()));
        }
        let finite = numerator
            .iter()
            .chain(&denominator)
            .chain([&numerator_offset, &denominator_offset])
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("linear_frac coefficients must be finite"));
        }
        Ok(Self {
            numerator,
            numerator_offset,
            denominator,
            denominator_offset,
        })
    }

    pub fn num_classes(&self) -> usize {
        self.numerator.len()
    }

    pub fn evaluate(&self, c: &ConfusionMatrix) -> Result<f64> {
        let m = self.numerator.len();
        if c.num_classes() != m {
            return Err(Error::dims("linear_frac coefficients", c.num_classes(), m));
        }
        let mut num = self.numerator_offset;
        let mut den = self.denominator_offset;
        for k in 0..m {
            let d = c.get(k, k);
            num += self.numerator[k] * d;
            den += self.denominator[k] * d;
        }
        if den <= 0.0 {
            return Err(Error::NumericalDomain(alloc::format!(
                "linear_frac denominator is {den}"
            )));
        }
        Ok(num / den)
    }

    pub fn name(&self) -> String {
        alloc::format!(
            "linear_frac:{};{};{};{}",
            join(&self.numerator),
            self.numerator_offset,
            join(&self.denominator),
            self.denominator_offset
        )
    }
}
