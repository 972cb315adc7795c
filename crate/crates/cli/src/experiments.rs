//! `elicit`, `bench` and `synth`.

use std::io::Write;
use std::time::Instant;

use reweigh_core::metrics::BuiltinMetric;
use reweigh_core::oracle::{elicit, ElicitConfig, EtaConfig, EtaSampler};
use reweigh_core::plugin::AlphaGrid;
use reweigh_core::synth::{make_shift_benchmark, BenchmarkConfig, NoiseSpec, ShiftSpec};
use reweigh_core::{fit, CountingMetric, FitConfig, Metric, SearchMode};
use serde::Serialize;

use crate::args::{BenchArgs, ElicitArgs, SynthArgs};
use crate::commands::{emit, emit_json};
use crate::error::{CliError, Result};
use crate::io;

#[derive(Debug, Serialize)]
struct ElicitRow {
    n: usize,
    beta_true: Vec<f64>,
    w_recovered: Vec<f64>,
    l1_error: f64,
    delta: f64,
    epsilon: f64,
    rho: f64,
    gamma: f64,
    bound_rhs: f64,
    within_bound: bool,
    metric_queries: u64,
}

pub fn cmd_elicit(args: &ElicitArgs, out: &mut dyn Write) -> Result<()> {
    let BuiltinMetric::LinearDiag(beta) = &args.metric else {
        return Err(CliError::Usage(format!(
            "elicit needs a linear_diag metric, got {}",
            args.metric.name()
        )));
    };
    let rows = args
        .n
        .iter()
        .map(|&n| {
            let r = elicit(beta, &ElicitConfig::new(n, args.epsilon, args.delta, args.seed))?;
            Ok(ElicitRow {
                n: r.n,
                beta_true: r.beta_true,
                w_recovered: r.w_recovered,
                l1_error: r.l1_error,
                delta: r.delta,
                epsilon: r.epsilon,
                rho: r.rho,
                gamma: r.gamma,
                bound_rhs: r.bound_rhs,
                within_bound: r.within_bound,
                metric_queries: r.metric_queries,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if args.json {
        return emit_json(out, &rows);
    }
    let mut text = format!(
        "hidden {} (epsilon {}, delta {}, seed {}); bound taken with constant 1\n",
        args.metric.name(),
        args.epsilon,
        args.delta,
        args.seed
    );
    text.push_str("n          l1_error  bound_rhs  within  rho       queries  recovered\n");
    for r in &rows {
        let w: Vec<String> = r.w_recovered.iter().map(|x| format!("{x:.4}")).collect();
        text.push_str(&format!(
            "{:<10} {:<9.5} {:<10.5} {:<7} {:<9.5} {:<8} [{}]\n",
            r.n,
            r.l1_error,
            r.bound_rhs,
            if r.within_bound { "yes" } else { "no" },
            r.rho,
            r.metric_queries,
            w.join(", ")
        ));
    }
    emit(out, &text)
}

#[derive(Debug, Serialize)]
struct BenchRow {
    classes: usize,
    epsilon: f64,
    n: usize,
    generator: &'static str,
    search: &'static str,
    evaluations: u64,
    /// Exact count for line search, upper bound for unimodal search.
    expected: u64,
    ok: bool,
    /// Total size of the per-class restrictions.
    restricted_samples: usize,
    wall_ms: f64,
}

/// Generators for the bench grid: near-balanced labels, and labels piled on
/// the reference class so that every restriction spans almost all samples.
fn bench_generator(name: &str, m: usize) -> EtaConfig {
    let mut config = EtaConfig::new(m);
    if name == "worst_case" {
        config.bias = vec![0.0; m];
        config.bias[m - 1] = (9.0 * (m - 1) as f64).ln();
    }
    config
}

fn unimodal_bound(m: usize, epsilon: f64) -> u64 {
    let log2 = (1.0 / epsilon).log2().ceil() as u64;
    (m as u64 - 1) * (2 * log2 + 2)
}

pub fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> Result<()> {
    if args.classes.iter().any(|&m| m < 2) {
        return Err(CliError::Usage("every class count must be at least 2".into()));
    }
    let mut modes = vec![SearchMode::Line];
    if args.metric.quasi_concave_pairwise() {
        modes.push(SearchMode::Unimodal);
    }
    let mut rows = Vec::new();
    for &m in &args.classes {
        super::commands::check_metric(&args.metric, m)?;
        for &epsilon in &args.epsilons {
            let grid_len = AlphaGrid::new(epsilon, epsilon)?.len() as u64;
            for generator in ["balanced", "worst_case"] {
                let set = EtaSampler::new(args.seed, bench_generator(generator, m))?.sample_set(args.n)?;
                for &mode in &modes {
                    let counting = CountingMetric::new(args.metric.clone());
                    let config = FitConfig {
                        epsilon,
                        search: mode,
                        parallel: args.parallel,
                        ..FitConfig::default()
                    };
                    let start = Instant::now();
                    let report = fit(&set, &counting, &config)?;
                    let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                    let evaluations = counting.evaluations();
                    let (expected, ok) = match mode {
                        SearchMode::Line => {
                            let expected = (m as u64 - 1) * grid_len;
                            (expected, evaluations == expected)
                        }
                        _ => {
                            let bound = unimodal_bound(m, epsilon);
                            (bound, evaluations <= bound)
                        }
                    };
                    rows.push(BenchRow {
                        classes: m,
                        epsilon,
                        n: args.n,
                        generator,
                        search: mode.as_str(),
                        evaluations,
                        expected,
                        ok,
                        restricted_samples: report.pairs.iter().map(|p| p.pair_size).sum(),
                        wall_ms,
                    });
                }
            }
        }
    }
    if args.json {
        emit_json(out, &rows)?;
    } else {
        let mut text = format!("metric {}, seed {}\n", args.metric.name(), args.seed);
        if modes.len() == 1 {
            text.push_str("unimodal rows skipped: the metric is not flagged quasi-concave\n");
        }
        text.push_str("m   epsilon  n       generator   search    evals   expected  ok   restricted  wall_ms\n");
        for r in &rows {
            let expected = if r.search == "line" {
                format!("={}", r.expected)
            } else {
                format!("<={}", r.expected)
            };
            text.push_str(&format!(
                "{:<3} {:<8} {:<7} {:<11} {:<9} {:<7} {:<9} {:<4} {:<11} {:.2}\n",
                r.classes,
                r.epsilon,
                r.n,
                r.generator,
                r.search,
                r.evaluations,
                expected,
                if r.ok { "yes" } else { "no" },
                r.restricted_samples,
                r.wall_ms
            ));
        }
        emit(out, &text)?;
    }
    let failed = rows.iter().filter(|r| !r.ok).count();
    if failed > 0 {
        return Err(CliError::Data(format!(
            "{failed} bench cells miss the expected evaluation count (a class absent from the data leaves its search empty)"
        )));
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct SplitTransform {
    classes: Vec<usize>,
    amount: f64,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct SynthSidecar {
    seed: u64,
    classes: usize,
    n_train_proxy: usize,
    n_val_drawn: usize,
    n_test_drawn: usize,
    temperature: f64,
    imbalance: f64,
    eta_scale: f64,
    source_prior: Vec<f64>,
    val_shift: Option<SplitTransform>,
    test_shift: Option<SplitTransform>,
    val_noise: Option<SplitTransform>,
    test_noise: Option<SplitTransform>,
    val_class_counts: Vec<usize>,
    test_class_counts: Vec<usize>,
    version: &'static str,
}

fn shift_json(spec: &Option<ShiftSpec>) -> Option<SplitTransform> {
    spec.as_ref().map(|s| SplitTransform {
        classes: s.affected_classes.clone(),
        amount: s.deletion_fraction,
        seed: s.seed,
    })
}

fn noise_json(spec: &Option<NoiseSpec>) -> Option<SplitTransform> {
    spec.as_ref().map(|s| SplitTransform {
        classes: s.affected_classes.clone(),
        amount: s.flip_probability,
        seed: s.seed,
    })
}

pub fn cmd_synth(args: &SynthArgs, out: &mut dyn Write) -> Result<()> {
    let mut config = BenchmarkConfig::new(args.seed, args.classes, args.n_val, args.n_test);
    config.temperature = args.temperature;
    config.imbalance = args.imbalance;
    if !args.shift_classes.is_empty() {
        config = config.with_shift(args.shift_classes.clone(), args.shift_fraction)?;
        if !args.shift_on.val() {
            config.val_shift = None;
        }
        if !args.shift_on.test() {
            config.test_shift = None;
        }
    }
    if !args.noise_classes.is_empty() {
        let spec = |seed| NoiseSpec::new(args.noise_classes.clone(), args.noise_prob, seed);
        if args.noise_on.val() {
            config.val_noise = Some(spec(args.seed ^ 0x3C)?);
        }
        if args.noise_on.test() {
            config.test_noise = Some(spec(args.seed ^ 0xC3)?);
        }
    }
    let bench = make_shift_benchmark(&config)?;

    std::fs::create_dir_all(&args.out)
        .map_err(|e| CliError::Data(format!("cannot create {}: {e}", args.out.display())))?;
    io::write_predictions(&bench.val, &args.out.join("val.csv"))?;
    io::write_predictions(&bench.test, &args.out.join("test.csv"))?;
    let sidecar = SynthSidecar {
        seed: config.seed,
        classes: config.num_classes,
        n_train_proxy: config.n_train_proxy,
        n_val_drawn: config.n_val,
        n_test_drawn: config.n_test,
        temperature: config.temperature,
        imbalance: config.imbalance,
        eta_scale: config.eta_scale,
        source_prior: bench.source_prior.clone(),
        val_shift: shift_json(&config.val_shift),
        test_shift: shift_json(&config.test_shift),
        val_noise: noise_json(&config.val_noise),
        test_noise: noise_json(&config.test_noise),
        val_class_counts: bench.val.class_counts().to_vec(),
        test_class_counts: bench.test.class_counts().to_vec(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let mut json = serde_json::to_string_pretty(&sidecar)
        .map_err(|e| CliError::Data(format!("cannot serialize spec: {e}")))?;
    json.push('\n');
    std::fs::write(args.out.join("spec.json"), json)
        .map_err(|e| CliError::Data(format!("cannot write spec.json: {e}")))?;
    emit(
        out,
        &format!(
            "wrote {} validation and {} test samples to {} (class counts {:?} / {:?})\n",
            bench.val.len(),
            bench.test.len(),
            args.out.display(),
            sidecar.val_class_counts,
            sidecar.test_class_counts
        ),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unimodal_bound_arithmetic() {
        assert_eq!(unimodal_bound(4, 0.01), 48);
        assert_eq!(unimodal_bound(3, 0.1), 20);
        assert_eq!(unimodal_bound(2, 0.5), 4);
    }

    #[test]
    fn worst_case_generator_piles_labels_on_the_reference() {
        let set = EtaSampler::new(1, bench_generator("worst_case", 4))
            .unwrap()
            .sample_set(2000)
            .unwrap();
        assert!(set.class_counts()[3] > 1200, "{:?}", set.class_counts());
    }
}
