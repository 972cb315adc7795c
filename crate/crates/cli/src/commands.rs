//! `fit`, `apply` and `eval`.

use std::io::Write;

use reweigh_core::baselines::{
    apply_vector_scaler, apply_vector_scaler_set, clean_eval, fit_vector_scaler, ScalerConfig,
};
use reweigh_core::metrics::BuiltinMetric;
use reweigh_core::synth::subsample;
use reweigh_core::{confusion_from_labels, fit, Metric, ProbabilityVector, SampleSet};
use serde::Serialize;

use crate::args::{ApplyArgs, EvalArgs, FitArgs, Method};
use crate::error::{CliError, Result};
use crate::io::{self, FitMetadata, WeightsEnvelope};

pub(crate) fn emit(out: &mut dyn Write, text: &str) -> Result<()> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Data(format!("cannot write output: {e}")))
}

pub(crate) fn emit_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Data(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    emit(out, &text)
}

/// Rejects parameterized metrics sized for a different class count.
pub(crate) fn check_metric(metric: &BuiltinMetric, m: usize) -> Result<()> {
    match metric.num_classes() {
        Some(k) if k != m => Err(CliError::Usage(format!(
            "metric {} has {k} coefficients per class vector but the data has {m} classes",
            metric.name()
        ))),
        _ => Ok(()),
    }
}

fn check_envelope(envelope: &WeightsEnvelope, m: usize) -> Result<()> {
    if envelope.num_classes() == m {
        Ok(())
    } else {
        Err(CliError::Data(format!(
            "weights are for {} classes but the predictions have {m}",
            envelope.num_classes()
        )))
    }
}

/// Labels predicted by a weights envelope of either kind.
pub fn predict(envelope: &WeightsEnvelope, probs: &[ProbabilityVector]) -> Result<Vec<usize>> {
    if let Some(w) = envelope.to_weight_vector()? {
        return probs.iter().map(|p| Ok(w.predict(p)?)).collect();
    }
    let scaler = envelope.to_scaler()?.expect("envelope is one of two kinds");
    probs
        .iter()
        .map(|p| Ok(apply_vector_scaler(p, &scaler)?.argmax()))
        .collect()
}

fn score_labels(set: &SampleSet, labels: &[usize], metric: &dyn Metric) -> Result<f64> {
    Ok(metric.evaluate(&confusion_from_labels(set, labels)?)?)
}

fn predictions(set: &SampleSet) -> Vec<ProbabilityVector> {
    set.samples().iter().map(|s| s.prediction.clone()).collect()
}

#[derive(Debug, Serialize)]
struct ClassRow {
    class: usize,
    /// Absent for the reference class and for empty restrictions.
    alpha: Option<f64>,
    weight: f64,
    pair_size: Option<usize>,
    evaluations: u64,
}

#[derive(Debug, Serialize)]
struct PluginFitSummary {
    method: &'static str,
    metric: String,
    n: usize,
    search: &'static str,
    epsilon: f64,
    rho: f64,
    reference_class: usize,
    classes: Vec<ClassRow>,
    metric_evaluations: u64,
    value: f64,
    warnings: Vec<String>,
}

#[derive(Debug, Serialize)]
struct ScalerFitSummary {
    method: &'static str,
    metric: String,
    n: usize,
    iterations: usize,
    initial_nll: f64,
    final_nll: f64,
    underdetermined: bool,
    value: f64,
}

pub fn cmd_fit(args: &FitArgs, out: &mut dyn Write) -> Result<()> {
    let set = io::read_predictions(&args.input)?;
    check_metric(&args.metric, set.num_classes())?;
    match args.method {
        Method::Plugin => fit_plugin(args, &set, out),
        Method::VectorScaler => fit_scaler(args, &set, out),
    }
}

fn fit_plugin(args: &FitArgs, set: &SampleSet, out: &mut dyn Write) -> Result<()> {
    let report = fit(set, &args.metric, &args.search.config())?;
    let w = &report.weights;
    let labels = predict_plugin(w, set)?;
    let value = score_labels(set, &labels, &args.metric)?;
    let envelope = WeightsEnvelope::from_weights(w, FitMetadata::new(set.len(), report.metric_evaluations));
    io::write_weights(&envelope, &args.out)?;

    let classes = (0..w.num_classes())
        .map(|k| {
            let pair = report.pairs.iter().find(|p| p.class == k);
            ClassRow {
                class: k,
                alpha: pair.and_then(|p| p.alpha),
                weight: w.weights()[k],
                pair_size: pair.map(|p| p.pair_size),
                evaluations: pair.map_or(0, |p| p.evaluations),
            }
        })
        .collect();
    let summary = PluginFitSummary {
        method: "plugin",
        metric: args.metric.name(),
        n: set.len(),
        search: w.search_mode().as_str(),
        epsilon: w.epsilon(),
        rho: w.rho(),
        reference_class: w.reference_class(),
        classes,
        metric_evaluations: report.metric_evaluations,
        value,
        warnings: report.warnings.iter().map(ToString::to_string).collect(),
    };
    if args.json {
        return emit_json(out, &summary);
    }
    let mut text = format!(
        "plugin fit of {} on {} samples (search {}, epsilon {}, rho {}, reference class {})\n",
        summary.metric, summary.n, summary.search, summary.epsilon, summary.rho, summary.reference_class
    );
    text.push_str("class  alpha     weight      pair_size  evaluations\n");
    for row in &summary.classes {
        let alpha = row.alpha.map_or_else(|| "-".to_string(), |a| format!("{a:.4}"));
        let pair = row.pair_size.map_or_else(|| "ref".to_string(), |p| p.to_string());
        text.push_str(&format!(
            "{:<6} {:<9} {:<11.6} {:<10} {}\n",
            row.class, alpha, row.weight, pair, row.evaluations
        ));
    }
    text.push_str(&format!("metric evaluations: {}\n", summary.metric_evaluations));
    text.push_str(&format!("{} on fitting set: {:.6}\n", summary.metric, summary.value));
    for warning in &summary.warnings {
        text.push_str(&format!("warning: {warning}\n"));
    }
    emit(out, &text)
}

fn predict_plugin(w: &reweigh_core::WeightVector, set: &SampleSet) -> Result<Vec<usize>> {
    set.samples().iter().map(|s| Ok(w.predict(&s.prediction)?)).collect()
}

fn fit_scaler(args: &FitArgs, set: &SampleSet, out: &mut dyn Write) -> Result<()> {
    let fitted = fit_vector_scaler(set, ScalerConfig::default())?;
    let value = clean_eval(&apply_vector_scaler_set(set, &fitted.scaler)?, &args.metric)?;
    let envelope = WeightsEnvelope::from_scaler(&fitted.scaler, FitMetadata::new(set.len(), fitted.iterations as u64));
    io::write_weights(&envelope, &args.out)?;
    let summary = ScalerFitSummary {
        method: "vector_scaler",
        metric: args.metric.name(),
        n: set.len(),
        iterations: fitted.iterations,
        initial_nll: fitted.initial_nll,
        final_nll: fitted.final_nll,
        underdetermined: fitted.underdetermined,
        value,
    };
    if args.json {
        return emit_json(out, &summary);
    }
    let mut text = format!(
        "vector scaler on {} samples: NLL {:.6} -> {:.6} after {} iterations\n{} on fitting set: {:.6}\n",
        summary.n, summary.initial_nll, summary.final_nll, summary.iterations, summary.metric, summary.value
    );
    if summary.underdetermined {
        text.push_str("warning: fewer samples than classes; the scaler is underdetermined\n");
    }
    emit(out, &text)
}

pub fn cmd_apply(args: &ApplyArgs, out: &mut dyn Write) -> Result<()> {
    let envelope = io::read_weights(&args.weights)?;
    let probs = io::read_probabilities(&args.input)?;
    check_envelope(&envelope, probs[0].num_classes())?;
    let labels = predict(&envelope, &probs)?;
    match &args.out {
        Some(path) => {
            let file = std::fs::File::create(path)
                .map_err(|e| CliError::Data(format!("cannot create {}: {e}", path.display())))?;
            io::format_labels(&labels, std::io::BufWriter::new(file))?;
            Ok(())
        }
        None => Ok(io::format_labels(&labels, out)?),
    }
}

#[derive(Debug, Serialize)]
struct EvalRow {
    metric: String,
    clean: f64,
    weighted: Option<f64>,
    predicted: Option<f64>,
}

#[derive(Debug, Serialize)]
struct EvalTable {
    n: usize,
    rows: Vec<EvalRow>,
}

#[derive(Debug, Serialize)]
struct MethodRow {
    method: &'static str,
    mean: f64,
    std: f64,
    values: Vec<f64>,
}

#[derive(Debug, Serialize)]
struct ResampleTable {
    metric: String,
    test_n: usize,
    pool_n: usize,
    val_size: usize,
    repeats: u64,
    seed: u64,
    rows: Vec<MethodRow>,
}

/// Mean and sample standard deviation (zero for a single value).
fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<()> {
    let set = io::read_predictions(&args.input)?;
    let m = set.num_classes();
    if let Some(metric) = &args.metric {
        check_metric(metric, m)?;
    }
    if let Some(pool) = &args.pool {
        let metric = args.metric.as_ref().expect("clap requires --metric with --pool");
        return eval_resampled(args, &set, &io::read_predictions(pool)?, metric, out);
    }

    let weighted = match &args.weights {
        Some(path) => {
            let envelope = io::read_weights(path)?;
            check_envelope(&envelope, m)?;
            Some(predict(&envelope, &predictions(&set))?)
        }
        None => None,
    };
    let predicted = match &args.predicted {
        Some(path) => {
            let labels = io::read_labels(path)?;
            if labels.len() != set.len() {
                return Err(CliError::Data(format!(
                    "{} has {} labels but the predictions have {} rows",
                    path.display(),
                    labels.len(),
                    set.len()
                )));
            }
            Some(labels)
        }
        None => None,
    };
    let metrics: Vec<BuiltinMetric> = match &args.metric {
        Some(metric) => vec![metric.clone()],
        None => BuiltinMetric::unparameterized().to_vec(),
    };
    let rows = metrics
        .iter()
        .map(|metric| {
            Ok(EvalRow {
                metric: metric.name(),
                clean: clean_eval(&set, metric)?,
                weighted: weighted.as_deref().map(|l| score_labels(&set, l, metric)).transpose()?,
                predicted: predicted.as_deref().map(|l| score_labels(&set, l, metric)).transpose()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let table = EvalTable { n: set.len(), rows };
    if args.json {
        return emit_json(out, &table);
    }
    let mut text = format!("{:<24} {:<10}", "metric", "clean");
    if weighted.is_some() {
        text.push_str(&format!(" {:<10}", "weighted"));
    }
    if predicted.is_some() {
        text.push_str(&format!(" {:<10}", "predicted"));
    }
    text = text.trim_end().to_string();
    text.push('\n');
    for row in &table.rows {
        let mut line = format!("{:<24} {:<10.6}", row.metric, row.clean);
        for v in [row.weighted, row.predicted].into_iter().flatten() {
            line.push_str(&format!(" {v:<10.6}"));
        }
        text.push_str(line.trim_end());
        text.push('\n');
    }
    emit(out, &text)
}

/// Fits plugin weights and a vector scaler on each validation draw and
/// scores both on the fixed test set alongside the raw predictions.
fn eval_resampled(
    args: &EvalArgs,
    test: &SampleSet,
    pool: &SampleSet,
    metric: &BuiltinMetric,
    out: &mut dyn Write,
) -> Result<()> {
    if pool.num_classes() != test.num_classes() {
        return Err(CliError::Data(format!(
            "pool has {} classes but the test set has {}",
            pool.num_classes(),
            test.num_classes()
        )));
    }
    let test_probs = predictions(test);
    let clean = clean_eval(test, metric)?;
    let config = args.search.config();
    let (mut scaled, mut plugin) = (Vec::new(), Vec::new());
    for repeat in 0..args.repeats {
        let val = subsample(pool, args.val_size, args.seed, repeat)?;
        let w = fit(&val, metric, &config)?.weights;
        plugin.push(score_labels(test, &predict_plugin(&w, test)?, metric)?);
        let scaler = fit_vector_scaler(&val, ScalerConfig::default())?.scaler;
        let labels = test_probs
            .iter()
            .map(|p| Ok(apply_vector_scaler(p, &scaler)?.argmax()))
            .collect::<Result<Vec<_>>>()?;
        scaled.push(score_labels(test, &labels, metric)?);
    }
    let row = |method, values: Vec<f64>| {
        let (mean, std) = mean_std(&values);
        MethodRow {
            method,
            mean,
            std,
            values,
        }
    };
    let table = ResampleTable {
        metric: metric.name(),
        test_n: test.len(),
        pool_n: pool.len(),
        val_size: args.val_size,
        repeats: args.repeats,
        seed: args.seed,
        rows: vec![
            row("clean", vec![clean; args.repeats as usize]),
            row("vector_scaler", scaled),
            row("plugin", plugin),
        ],
    };
    if args.json {
        return emit_json(out, &table);
    }
    let mut text = format!(
        "{} on {} test samples; {} validation draws of {} from a pool of {} (seed {})\n",
        table.metric, table.test_n, table.repeats, table.val_size, table.pool_n, table.seed
    );
    text.push_str("method          mean +/- std\n");
    for r in &table.rows {
        text.push_str(&format!("{:<15} {:.4} +/- {:.4}\n", r.method, r.mean, r.std));
    }
    emit(out, &text)
}
