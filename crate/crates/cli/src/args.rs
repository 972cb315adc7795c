use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use reweigh_core::metrics::{parse_metric_spec, BuiltinMetric};
use reweigh_core::{FitConfig, SearchMode};

#[derive(Debug, Parser)]
#[command(
    name = "reweigh",
    version,
    about = "Post-hoc class reweighting of black-box classifier predictions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit class weights (or a vector scaler) on a labeled prediction file.
    Fit(FitArgs),
    /// Predict labels with a fitted weights file.
    Apply(ApplyArgs),
    /// Score predictions, optionally against weights or resampled fits.
    Eval(EvalArgs),
    /// Recover a hidden linear-diagonal metric from synthetic data.
    Elicit(ElicitArgs),
    /// Count metric evaluations and time the search modes.
    Bench(BenchArgs),
    /// Write a synthetic shifted benchmark to disk.
    Synth(SynthArgs),
}

fn parse_metric(s: &str) -> Result<BuiltinMetric, String> {
    parse_metric_spec(s).map_err(|e| e.to_string())
}

fn parse_open_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("{v} is outside (0, 1)"))
    }
}

fn parse_closed_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside [0, 1]"))
    }
}

fn parse_search(s: &str) -> Result<SearchMode, String> {
    s.parse().map_err(|e: reweigh_core::Error| e.to_string())
}

/// Settings of one plugin fit.
#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// Grid step for each class threshold.
    #[arg(long, default_value_t = 0.01, value_parser = parse_open_unit)]
    pub epsilon: f64,
    /// Upper cutoff margin; thresholds stay in [0, 1 - rho]. Defaults to epsilon.
    #[arg(long, value_parser = parse_open_unit)]
    pub rho: Option<f64>,
    /// Fixed comparison class. Defaults to the last class.
    #[arg(long)]
    pub reference_class: Option<usize>,
    /// line, unimodal, or auto (unimodal only for metrics flagged quasi-concave).
    #[arg(long, default_value = "auto", value_parser = parse_search)]
    pub search: SearchMode,
    /// Run the per-class searches on a thread pool.
    #[arg(long)]
    pub parallel: bool,
}

impl SearchArgs {
    pub fn config(&self) -> FitConfig {
        FitConfig {
            epsilon: self.epsilon,
            rho: self.rho,
            reference_class: self.reference_class,
            search: self.search,
            parallel: self.parallel,
            ..FitConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Per-class weights on the predicted probabilities.
    Plugin,
    /// Diagonal affine map of the probabilities followed by softmax.
    VectorScaler,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    /// Labeled prediction CSV.
    #[arg(long = "in", value_name = "CSV")]
    pub input: PathBuf,
    /// Weights JSON to write.
    #[arg(long, value_name = "JSON")]
    pub out: PathBuf,
    /// Metric to maximize, e.g. `f1_macro` or `linear_diag:0.5,0.3,0.2`.
    #[arg(long, value_parser = parse_metric)]
    pub metric: BuiltinMetric,
    #[arg(long, value_enum, default_value_t = Method::Plugin)]
    pub method: Method,
    #[command(flatten)]
    pub search: SearchArgs,
    /// Print the report as JSON.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    /// Prediction CSV; the `label` column is optional.
    #[arg(long = "in", value_name = "CSV")]
    pub input: PathBuf,
    #[arg(long, value_name = "JSON")]
    pub weights: PathBuf,
    /// Label file to write; standard output when omitted.
    #[arg(long, value_name = "CSV")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Labeled prediction CSV to score (the test set when resampling).
    #[arg(long = "in", value_name = "CSV")]
    pub input: PathBuf,
    /// Score only this metric. Required with --pool.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<BuiltinMetric>,
    /// Also score the weighted predictions of this weights file.
    #[arg(long, value_name = "JSON", conflicts_with = "pool")]
    pub weights: Option<PathBuf>,
    /// Also score these predicted labels (as written by `apply`).
    #[arg(long, value_name = "CSV", conflicts_with = "pool")]
    pub predicted: Option<PathBuf>,
    /// Labeled pool to draw validation sets from; enables resampling mode.
    #[arg(long, value_name = "CSV", requires = "metric")]
    pub pool: Option<PathBuf>,
    /// Number of validation draws.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub repeats: u64,
    /// Size of each validation draw.
    #[arg(long, default_value_t = 100)]
    pub val_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub search: SearchArgs,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct ElicitArgs {
    /// Hidden metric, `linear_diag:b_1,...,b_m` with a positive last entry.
    #[arg(long, value_parser = parse_metric)]
    pub metric: BuiltinMetric,
    /// Sample sizes, one report per entry.
    #[arg(long, value_delimiter = ',', default_value = "10000")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 0.001, value_parser = parse_open_unit)]
    pub epsilon: f64,
    /// Failure probability in the reported bound.
    #[arg(long, default_value_t = 0.05, value_parser = parse_open_unit)]
    pub delta: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Metric to count; the unimodal rows need a quasi-concave one.
    #[arg(long, default_value = "accuracy", value_parser = parse_metric)]
    pub metric: BuiltinMetric,
    #[arg(long, value_delimiter = ',', default_value = "3,4,8")]
    pub classes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01", value_parser = parse_open_unit)]
    pub epsilons: Vec<f64>,
    /// Samples per generated set.
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub parallel: bool,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Split {
    Val,
    Test,
    Both,
}

impl Split {
    pub fn val(self) -> bool {
        matches!(self, Split::Val | Split::Both)
    }

    pub fn test(self) -> bool {
        matches!(self, Split::Test | Split::Both)
    }
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory for val.csv, test.csv and spec.json.
    #[arg(long, value_name = "DIR")]
    pub out: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub classes: usize,
    #[arg(long, default_value_t = 1000)]
    pub n_val: usize,
    #[arg(long, default_value_t = 5000)]
    pub n_test: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Proxy softmax temperature.
    #[arg(long, default_value_t = 2.0)]
    pub temperature: f64,
    /// Source logit offset per class index.
    #[arg(long, default_value_t = 0.5)]
    pub imbalance: f64,
    /// Classes to thin out.
    #[arg(long, value_delimiter = ',')]
    pub shift_classes: Vec<usize>,
    /// Fraction of each shifted class to delete.
    #[arg(long, default_value_t = 0.8, value_parser = parse_closed_unit)]
    pub shift_fraction: f64,
    #[arg(long, value_enum, default_value_t = Split::Both)]
    pub shift_on: Split,
    /// Classes whose labels are flipped.
    #[arg(long, value_delimiter = ',')]
    pub noise_classes: Vec<usize>,
    /// Flip probability for noisy classes.
    #[arg(long, default_value_t = 0.6, value_parser = parse_closed_unit)]
    pub noise_prob: f64,
    #[arg(long, value_enum, default_value_t = Split::Val)]
    pub noise_on: Split,
}
