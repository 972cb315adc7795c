use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::formulas::{accuracy, f_measure_macro, fowlkes_mallows_macro, g_mean_macro, mcc};
use super::linear::{LinearDiagonalMetric, LinearFractionalMetric};
use super::Metric;
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};

/// Names accepted by [`lookup`].
pub const METRIC_NAMES: [&str; 7] = [
    "accuracy",
    "f1_macro",
    "gmean_macro",
    "mcc",
    "fowlkes_mallows_macro",
    "linear_diag",
    "linear_frac",
];

/// The named metrics available from the command line.
#[derive(Debug, Clone, PartialEq)]
pub enum BuiltinMetric {
    Accuracy,
    F1Macro,
    GMeanMacro,
    /// Matthews correlation shifted to `[0, 1]`.
    Mcc,
    FowlkesMallowsMacro,
    LinearDiag(LinearDiagonalMetric),
    LinearFrac(LinearFractionalMetric),
}

impl BuiltinMetric {
    /// The parameter-free metrics, in table order.
    pub fn unparameterized() -> [BuiltinMetric; 5] {
        [
            BuiltinMetric::Accuracy,
            BuiltinMetric::F1Macro,
            BuiltinMetric::GMeanMacro,
            BuiltinMetric::Mcc,
            BuiltinMetric::FowlkesMallowsMacro,
        ]
    }

    /// Class count fixed by the parameters, if any.
    pub fn num_classes(&self) -> Option<usize> {
        match self {
            BuiltinMetric::LinearDiag(m) => Some(m.num_classes()),
            BuiltinMetric::LinearFrac(m) => Some(m.num_classes()),
            _ => None,
        }
    }
}

impl Metric for BuiltinMetric {
    fn name(&self) -> String {
        match self {
            BuiltinMetric::Accuracy => "accuracy".to_string(),
            BuiltinMetric::F1Macro => "f1_macro".to_string(),
            BuiltinMetric::GMeanMacro => "gmean_macro".to_string(),
            BuiltinMetric::Mcc => "mcc".to_string(),
            BuiltinMetric::FowlkesMallowsMacro => "fowlkes_mallows_macro".to_string(),
            BuiltinMetric::LinearDiag(m) => m.name(),
            BuiltinMetric::LinearFrac(m) => m.name(),
        }
    }

    fn evaluate(&self, c: &ConfusionMatrix) -> Result<f64> {
        match self {
            BuiltinMetric::Accuracy => Ok(accuracy(c)),
            BuiltinMetric::F1Macro => Ok(f_measure_macro(c)),
            BuiltinMetric::GMeanMacro => Ok(g_mean_macro(c)),
            BuiltinMetric::Mcc => Ok(mcc(c)),
            BuiltinMetric::FowlkesMallowsMacro => Ok(fowlkes_mallows_macro(c)),
            BuiltinMetric::LinearDiag(m) => m.evaluate(c),
            BuiltinMetric::LinearFrac(m) => m.evaluate(c),
        }
    }

    fn quasi_concave_pairwise(&self) -> bool {
        matches!(
            self,
            BuiltinMetric::Accuracy | BuiltinMetric::LinearDiag(_) | BuiltinMetric::LinearFrac(_)
        )
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .map_err(|_| Error::Parse(alloc::format!("`{t}` is not a number")))
        })
        .collect()
}

fn parse_scalar(text: &str) -> Result<f64> {
    let t = text.trim();
    t.parse::<f64>()
        .map_err(|_| Error::Parse(alloc::format!("`{t}` is not a number")))
}

/// Resolves a metric by name, parsing coefficients for the parametric
/// families: `linear_diag` takes `c1,...,cm` and `linear_frac` takes
/// `a1,...,am;b;c1,...,cm;d`.
pub fn lookup(name: &str, params: Option<&str>) -> Result<BuiltinMetric> {
    let simple = match name {
        "accuracy" => Some(BuiltinMetric::Accuracy),
        "f1_macro" => Some(BuiltinMetric::F1Macro),
        "gmean_macro" => Some(BuiltinMetric::GMeanMacro),
        "mcc" => Some(BuiltinMetric::Mcc),
        "fowlkes_mallows_macro" => Some(BuiltinMetric::FowlkesMallowsMacro),
        "linear_diag" | "linear_frac" => None,
        other => return Err(Error::NotFound(other.to_string())),
    };
    if let Some(metric) = simple {
        return match params {
            None => Ok(metric),
            Some(p) => Err(Error::Parse(alloc::format!(
                "metric `{name}` takes no parameters, got `{p}`"
            ))),
        };
    }
    let params =
        params.ok_or_else(|| Error::Parse(alloc::format!("metric `{name}` needs coefficients")))?;
    if name == "linear_diag" {
        return Ok(BuiltinMetric::LinearDiag(LinearDiagonalMetric::new(parse_list(params)?)?));
    }
    let parts: Vec<&str> = params.split(';').collect();
    if parts.len() != 4 {
        return Err(Error::Parse(alloc::format!(
            "linear_frac expects `a1,..,am;b;c1,..,cm;d`, got `{params}`"
        )));
    }
    Ok(BuiltinMetric::LinearFrac(LinearFractionalMetric::new(
        parse_list(parts[0])?,
        parse_scalar(parts[1])?,
        parse_list(parts[2])?,
        parse_scalar(parts[3])?,
    )?))
}

/// Parses `name` or `name:params`.
pub fn parse_metric_spec(spec: &str) -> Result<BuiltinMetric> {
    match spec.split_once(':') {
        Some((name, params)) => lookup(name.trim(), Some(params)),
        None => lookup(spec.trim(), None),
    }
}
