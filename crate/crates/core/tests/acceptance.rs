//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reweigh_core::baselines::{clean_eval, fit_vector_scaler, nll, nll_gradient, ScalerConfig};
use reweigh_core::metrics::{
    accuracy, f_measure_binary, f_measure_macro, g_mean_macro, mcc_raw, BuiltinMetric,
    LinearDiagonalMetric, LinearFractionalMetric,
};
use reweigh_core::oracle::{
    brute_force_fit, compare_to_oracle, consistency_rho, elicit, ElicitConfig, EtaConfig,
    EtaSampler, GridSpec,
};
use reweigh_core::plugin::{
    alpha_line_search, alpha_line_search_naive, alpha_unimodal_search, fit, restrict_sample,
    restricted_predict, AlphaGrid, FitConfig, SearchMode,
};
use reweigh_core::synth::{
    apply_label_noise, apply_label_shift, make_shift_benchmark, subsample, BenchmarkConfig,
    NoiseSpec, ShiftSpec,
};
use reweigh_core::{
    confusion_from_weights, ConfusionMatrix, CountingMetric, Error, Metric, SampleSet,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn random_beta(rng: &mut ChaCha8Rng, m: usize) -> LinearDiagonalMetric {
    let raw: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    LinearDiagonalMetric::new(raw.iter().map(|b| b / total).collect()).unwrap()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Independent grid maximum over weights `(α_0/(1-α_0), ..., 1)` built
/// without the library's grid enumeration.
fn matched_grid_max(set: &SampleSet, metric: &dyn Metric, epsilon: f64) -> f64 {
    let m = set.num_classes();
    let steps = ((1.0 - epsilon) / epsilon * (1.0 + 1e-9)).floor() as usize;
    let axis: Vec<f64> = (0..=steps)
        .map(|i| {
            let a = (i as f64 * epsilon).min(1.0 - epsilon);
            a / (1.0 - a)
        })
        .collect();
    let mut best = f64::NEG_INFINITY;
    let mut digits = vec![0usize; m - 1];
    loop {
        let mut raw: Vec<f64> = digits.iter().map(|&d| axis[d]).collect();
        raw.push(1.0);
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mut counts = vec![0usize; m * m];
        for s in set.samples() {
            let mut pred = 0;
            for k in 1..m {
                if s.prediction[k] * w[k] > s.prediction[pred] * w[pred] {
                    pred = k;
                }
            }
            counts[s.label * m + pred] += 1;
        }
        let entries = counts.iter().map(|&c| c as f64 / set.len() as f64).collect();
        let c = ConfusionMatrix::from_entries(m, entries).unwrap();
        best = best.max(metric.evaluate(&c).unwrap());
        let mut i = m - 2;
        loop {
            digits[i] += 1;
            if digits[i] < axis.len() {
                break;
            }
            digits[i] = 0;
            if i == 0 {
                return best;
            }
            i -= 1;
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (m, n, epsilon) = (3, 100, 0.05);
    let mut worst_gap = f64::NEG_INFINITY;
    let mut min_gap = f64::INFINITY;
    let mut oracle_mismatch = 0;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1_000 + seed);
        let metric = BuiltinMetric::LinearDiag(random_beta(&mut rng, m));
        let set = EtaSampler::new(seed, EtaConfig::new(m)).unwrap().sample_set(n).unwrap();
        let cmp = compare_to_oracle(&set, &metric, epsilon).unwrap();
        if (matched_grid_max(&set, &metric, epsilon) - cmp.brute_value).abs() > 1e-12 {
            oracle_mismatch += 1;
        }
        worst_gap = worst_gap.max(cmp.gap);
        min_gap = min_gap.min(cmp.gap);
    }
    let secs = start.elapsed().as_secs_f64();
    let bound = epsilon * m as f64;
    outcome(
        worst_gap <= bound && min_gap >= -1e-12 && oracle_mismatch == 0 && secs < 10.0,
        format!(
            "oracle equivalence (linear_diag, m=3, n=100, eps=0.05): max gap {worst_gap:.4} <= {bound:.2}, min gap {min_gap:.2e} >= 0, independent grid mismatches {oracle_mismatch}, {secs:.2}s < 10s"
        ),
    )
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (epsilon, delta) = (1e-3, 0.05);
    let betas = [
        vec![0.5, 0.3, 0.2],
        vec![0.7, 0.2, 0.1],
        vec![0.25, 0.25, 0.25, 0.25],
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for beta in &betas {
        let metric = LinearDiagonalMetric::new(beta.clone()).unwrap();
        let report = elicit(&metric, &ElicitConfig::new(100_000, epsilon, delta, 17)).unwrap();
        let expected_rho = consistency_rho(beta).unwrap();
        pass &= report.l1_error <= 0.05 && report.rho == expected_rho;
        let medians: Vec<f64> = [100usize, 1_000, 10_000]
            .iter()
            .map(|&n| {
                median(
                    (0..10u64)
                        .map(|seed| {
                            elicit(&metric, &ElicitConfig::new(n, epsilon, delta, 100 + seed))
                                .unwrap()
                                .l1_error
                        })
                        .collect(),
                )
            })
            .collect();
        let decreasing = medians.windows(2).all(|w| w[1] < w[0]);
        pass &= decreasing;
        parts.push(format!(
            "beta={beta:?}: l1 {:.4} <= 0.05 (bound_rhs {:.3}, rho {:.4}), medians n=1e2/1e3/1e4 {:.3}/{:.3}/{:.3}",
            report.l1_error, report.bound_rhs, report.rho, medians[0], medians[1], medians[2]
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    outcome(
        pass,
        format!("elicitation (n=1e5, eps=1e-3): {}; {secs:.1}s < 60s", parts.join("; ")),
    )
}

/// A two-label sample where every class-`k` odds ratio exceeds every
/// reference odds ratio, with repeated odds and `p_ref = 0` rows.
fn separable_sample(rng: &mut ChaCha8Rng) -> (SampleSet, usize, usize) {
    let m = rng.random_range(2..=5);
    let (k, reference) = (0, m - 1);
    let n = rng.random_range(4..=60);
    let tau: f64 = rng.random_range(0.2..5.0);
    let k_odds: Vec<f64> = (0..4).map(|_| tau * rng.random_range(1.02..4.0)).collect();
    let ref_odds: Vec<f64> = (0..4).map(|_| tau / rng.random_range(1.02..4.0)).collect();
    let mut preds = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let label = if rng.random_bool(0.5) { k } else { reference };
        let pair_mass = if m == 2 { 1.0 } else { rng.random_range(0.3..1.0) };
        let mut p = vec![(1.0 - pair_mass) / (m - 2).max(1) as f64; m];
        if label == k && rng.random_bool(0.1) {
            p[k] = pair_mass;
            p[reference] = 0.0;
        } else {
            let pool = if label == k { &k_odds } else { &ref_odds };
            let r = pool[rng.random_range(0..pool.len())];
            p[k] = pair_mass * r / (1.0 + r);
            p[reference] = pair_mass / (1.0 + r);
        }
        preds.push(p);
        labels.push(label);
    }
    (SampleSet::from_parts(preds, &labels).unwrap(), k, reference)
}

fn monotone_linear_frac(rng: &mut ChaCha8Rng, m: usize) -> LinearFractionalMetric {
    let a: Vec<f64> = (0..m).map(|_| rng.random_range(0.05..1.0)).collect();
    let b = rng.random_range(0.0..0.5);
    let c: Vec<f64> = (0..m).map(|_| -rng.random_range(0.0..1.0)).collect();
    let d = c.iter().map(|x| x.abs()).sum::<f64>() + rng.random_range(0.1..1.0);
    LinearFractionalMetric::new(a, b, c, d).unwrap()
}

fn criterion_3() -> Outcome {
    let mut pass = true;
    let mut count_lines = Vec::new();
    for &m in &[3usize, 5, 8] {
        for &q in &[10u64, 100] {
            let epsilon = 1.0 / q as f64;
            let set = EtaSampler::new(m as u64, EtaConfig { scale: 0.8, ..EtaConfig::new(m) })
                .unwrap()
                .sample_set(400)
                .unwrap();
            // (1 - ρ)/ε + 1 with ρ = ε = 1/q is exactly q.
            let expected_line = (m as u64 - 1) * q;
            let line_metric = CountingMetric::new(BuiltinMetric::F1Macro);
            let line_cfg = FitConfig {
                epsilon,
                search: SearchMode::Line,
                ..FitConfig::default()
            };
            let line = fit(&set, &line_metric, &line_cfg).unwrap();
            let all_pairs = line.pairs.iter().all(|p| p.alpha.is_some());
            let log2 = (q as f64).log2().ceil() as u64;
            let uni_bound = (m as u64 - 1) * (2 * log2 + 2);
            let uni_metric = CountingMetric::new(BuiltinMetric::Accuracy);
            let uni_cfg = FitConfig {
                epsilon,
                search: SearchMode::Unimodal,
                ..FitConfig::default()
            };
            fit(&set, &uni_metric, &uni_cfg).unwrap();
            let ok = all_pairs
                && line_metric.evaluations() == expected_line
                && line.metric_evaluations == expected_line
                && uni_metric.evaluations() <= uni_bound;
            pass &= ok;
            count_lines.push(format!(
                "m={m} eps={epsilon}: line {}={expected_line}, unimodal {}<={uni_bound}",
                line_metric.evaluations(),
                uni_metric.evaluations()
            ));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut max_diff: f64 = 0.0;
    for i in 0..50 {
        let (set, k, reference) = separable_sample(&mut rng);
        let m = set.num_classes();
        let metric = match i % 3 {
            0 => BuiltinMetric::Accuracy,
            1 => BuiltinMetric::LinearDiag(random_beta(&mut rng, m)),
            _ => BuiltinMetric::LinearFrac(monotone_linear_frac(&mut rng, m)),
        };
        let epsilon = [0.1, 0.05, 0.01][i % 3];
        let grid = AlphaGrid::new(epsilon, epsilon).unwrap();
        let r = restrict_sample(&set, k, reference).unwrap();
        let line = alpha_line_search(&r, &metric, &grid).unwrap();
        let uni = alpha_unimodal_search(&r, &metric, &grid).unwrap();
        max_diff = max_diff.max((line.value - uni.value).abs());
    }
    pass &= max_diff <= 1e-12;
    outcome(
        pass,
        format!(
            "evaluation counts: {}; unimodal vs line value on 50 quasi-concave restricted samples: max |diff| {max_diff:.1e} <= 1e-12",
            count_lines.join(", ")
        ),
    )
}

fn metric_for(i: usize, rng: &mut ChaCha8Rng, m: usize) -> BuiltinMetric {
    match i % 6 {
        0 => BuiltinMetric::Accuracy,
        1 => BuiltinMetric::F1Macro,
        2 => BuiltinMetric::GMeanMacro,
        3 => BuiltinMetric::Mcc,
        4 => BuiltinMetric::FowlkesMallowsMacro,
        _ => BuiltinMetric::LinearDiag(random_beta(rng, m)),
    }
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let mut mismatches = 0;
    for i in 0..20 {
        let m = rng.random_range(2..=6);
        let n = rng.random_range(20..=500);
        let set = EtaSampler::new(400 + i as u64, EtaConfig::new(m))
            .unwrap()
            .sample_set(n)
            .unwrap();
        let metric = metric_for(i, &mut rng, m);
        let base = FitConfig {
            epsilon: 0.01,
            search: SearchMode::Line,
            ..FitConfig::default()
        };
        let a = fit(&set, &metric, &base).unwrap().weights;
        let b = fit(&set, &metric, &FitConfig { reverse_order: true, ..base.clone() })
            .unwrap()
            .weights;
        let c = fit(&set, &metric, &FitConfig { parallel: true, ..base.clone() })
            .unwrap()
            .weights;
        let bits = |w: &[f64]| w.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        if a != b || a != c || bits(a.weights()) != bits(b.weights()) || bits(a.weights()) != bits(c.weights()) {
            mismatches += 1;
        }
    }
    outcome(
        mismatches == 0,
        format!("order/parallel determinism: {mismatches} of 20 instances differ bitwise (m <= 6, n <= 500)"),
    )
}

/// A restriction with repeated odds, `p_ref = 0`, `p_k = 0` and all-zero
/// pair mass rows.
fn tied_sample(rng: &mut ChaCha8Rng) -> (SampleSet, usize, usize) {
    let m = rng.random_range(2..=4);
    let (k, reference) = (rng.random_range(0..m - 1), m - 1);
    let n = rng.random_range(1..=80);
    let levels = [0.0, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0];
    let mut preds = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let pair_mass = if m == 2 { 1.0 } else { [0.0, 0.5, 1.0][rng.random_range(0..3)] };
        let share = levels[rng.random_range(0..levels.len())];
        let mut p = vec![0.0; m];
        let others: Vec<usize> = (0..m).filter(|&j| j != k && j != reference).collect();
        for &j in &others {
            p[j] = (1.0 - pair_mass) / others.len() as f64;
        }
        p[k] = pair_mass * share;
        p[reference] = pair_mass * (1.0 - share);
        preds.push(p);
        labels.push(if rng.random_bool(0.5) { k } else { reference });
    }
    (SampleSet::from_parts(preds, &labels).unwrap(), k, reference)
}

/// First grid index of the maximum, computed by re-predicting every sample
/// with the public restricted rule.
fn exhaustive_alpha(set: &SampleSet, metric: &dyn Metric, k: usize, reference: usize, grid: &AlphaGrid) -> (usize, f64) {
    let m = set.num_classes();
    let pair: Vec<_> = set.samples().iter().filter(|s| s.label == k || s.label == reference).collect();
    let mut best = (0, f64::NEG_INFINITY);
    for i in 0..grid.len() {
        let mut counts = vec![0usize; m * m];
        for s in &pair {
            counts[s.label * m + restricted_predict(grid.alpha(i), k, reference, &s.prediction).unwrap()] += 1;
        }
        let entries = counts.iter().map(|&c| c as f64 / pair.len() as f64).collect();
        let v = metric.evaluate(&ConfusionMatrix::from_entries(m, entries).unwrap()).unwrap();
        if v > best.1 {
            best = (i, v);
        }
    }
    best
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let (mut disagreements, mut oracle_disagreements, mut with_zero_ref) = (0, 0, 0);
    for i in 0..50 {
        let (set, k, reference) = tied_sample(&mut rng);
        if set.samples().iter().any(|s| s.prediction[reference] == 0.0 && s.prediction[k] > 0.0) {
            with_zero_ref += 1;
        }
        let metric = metric_for(i, &mut rng, set.num_classes());
        let epsilon = [0.1, 0.05, 0.01, 0.25][i % 4];
        let grid = AlphaGrid::new(epsilon, epsilon).unwrap();
        let r = restrict_sample(&set, k, reference).unwrap();
        if r.is_empty() {
            continue;
        }
        let fast = alpha_line_search(&r, &metric, &grid).unwrap();
        let slow = alpha_line_search_naive(&r, &metric, &grid).unwrap();
        if fast.alpha.to_bits() != slow.alpha.to_bits()
            || fast.value.to_bits() != slow.value.to_bits()
            || fast.index != slow.index
        {
            disagreements += 1;
        }
        let (index, value) = exhaustive_alpha(&set, &metric, k, reference, &grid);
        if index != slow.index || (value - slow.value).abs() > 1e-12 {
            oracle_disagreements += 1;
        }
    }
    outcome(
        disagreements == 0 && oracle_disagreements == 0 && with_zero_ref > 0,
        format!(
            "incremental vs naive: {disagreements} of 50 differ bitwise, {oracle_disagreements} differ from the exhaustive re-prediction oracle ({with_zero_ref} samples contain p_ref = 0 rows)"
        ),
    )
}

fn criterion_6() -> Outcome {
    let tol = 1e-12;
    let cm = |m: usize, e: &[f64]| ConfusionMatrix::from_entries(m, e.to_vec()).unwrap();
    let f1 = f_measure_binary(&cm(2, &[0.4, 0.1, 0.1, 0.4])).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let mut trace_err: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(2..=6);
        let raw: Vec<f64> = (0..m * m).map(|_| rng.random::<f64>()).collect();
        let total: f64 = raw.iter().sum();
        let e: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let trace: f64 = (0..m).map(|i| e[i * m + i]).sum();
        trace_err = trace_err.max((accuracy(&cm(m, &e)) - trace).abs());
    }
    // Constant predictor: everything predicted as class 1.
    let constant = mcc_raw(&cm(3, &[0.0, 0.3, 0.0, 0.0, 0.3, 0.0, 0.0, 0.4, 0.0]));
    // Class 1 recall is zero.
    let gmean = g_mean_macro(&cm(2, &[0.5, 0.0, 0.5, 0.0]));
    let gmean_pos = g_mean_macro(&cm(2, &[0.4, 0.1, 0.2, 0.3]));
    let macro_f1 = f_measure_macro(&cm(2, &[0.4, 0.1, 0.1, 0.4]));
    let pass = (f1 - 0.8).abs() <= tol
        && trace_err <= tol
        && constant.abs() <= tol
        && gmean.abs() <= tol
        && (gmean_pos - (0.8f64 * 0.6).sqrt()).abs() <= tol
        && (macro_f1 - 0.8).abs() <= tol;
    outcome(
        pass,
        format!(
            "formula spot checks: binary F1 {f1}, max |accuracy - trace| {trace_err:.1e} over 100 matrices, constant-predictor raw MCC {constant}, zero-recall G-mean {gmean}, G-mean sqrt(0.48) err {:.1e} (tol 1e-12)",
            (gmean_pos - (0.8f64 * 0.6).sqrt()).abs()
        ),
    )
}

fn criterion_7() -> Outcome {
    let n = 10_000;
    let m = 3;
    let labels: Vec<usize> = (0..n).map(|i| i % m).collect();
    let set = SampleSet::from_parts(vec![vec![1.0 / 3.0; 3]; n], &labels).unwrap();
    let within = |count: usize, trials: usize, p: f64| {
        let mean = trials as f64 * p;
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        ((count as f64 - mean) / sd, (count as f64 - mean).abs() <= 3.0 * sd)
    };

    let shifted = apply_label_shift(&set, &ShiftSpec::new(vec![0, 1], 0.8, 2024).unwrap()).unwrap();
    let affected = labels.iter().filter(|&&y| y < 2).count();
    let survived = shifted.labels().filter(|&y| y < 2).count();
    let untouched = shifted.class_counts()[2] == set.class_counts()[2];
    let (z_shift, ok_shift) = within(survived, affected, 0.2);

    let noisy = apply_label_noise(&set, &NoiseSpec::new(vec![0, 1, 2], 0.6, 2025).unwrap()).unwrap();
    let flipped = set
        .samples()
        .iter()
        .zip(noisy.samples())
        .filter(|(a, b)| a.label != b.label)
        .count();
    let (z_noise, ok_noise) = within(flipped, n, 0.6);
    // Each original class spreads its flips evenly over the other two.
    let mut split_ok = true;
    for y in 0..m {
        let n_y = set.class_counts()[y];
        for target in (0..m).filter(|&t| t != y) {
            let moved = set
                .samples()
                .iter()
                .zip(noisy.samples())
                .filter(|(a, b)| a.label == y && b.label == target)
                .count();
            split_ok &= within(moved, n_y, 0.3).1;
        }
    }
    outcome(
        ok_shift && untouched && ok_noise && split_ok,
        format!(
            "shift/noise statistics (n=1e4): survivors {survived}/{affected} z={z_shift:.2}, unaffected kept {untouched}; flips {flipped}/{n} z={z_noise:.2}, per-target splits within 3 sigma {split_ok}"
        ),
    )
}

fn criterion_8() -> Outcome {
    let config = BenchmarkConfig::new(8, 4, 4_000, 20_000)
        .with_shift(vec![0, 1], 0.8)
        .unwrap();
    let bench = make_shift_benchmark(&config).unwrap();
    let metric = BuiltinMetric::F1Macro;
    let clean = clean_eval(&bench.test, &metric).unwrap();
    let fit_config = FitConfig {
        epsilon: 0.01,
        search: SearchMode::Line,
        ..FitConfig::default()
    };
    let mut gains = Vec::new();
    for repeat in 0..5 {
        let val = subsample(&bench.val, 100, 8, repeat).unwrap();
        let report = fit(&val, &metric, &fit_config).unwrap();
        let test_value = metric
            .evaluate(&confusion_from_weights(&bench.test, report.weights.weights()).unwrap())
            .unwrap();
        gains.push(test_value - clean);
    }
    let wins = gains.iter().filter(|&&g| g > 0.0).count();
    let mean = gains.iter().sum::<f64>() / gains.len() as f64;
    outcome(
        wins >= 4 && mean > 0.0,
        format!(
            "directional improvement (f1_macro, m=4, knock-out 0.8 on {{0,1}}, |S|=100): clean test {clean:.4}, gains {:?}, {wins}/5 improve (>= 4), mean {mean:+.4} > 0",
            gains.iter().map(|g| (g * 1e4).round() / 1e4).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    let mut nll_ok = true;
    for point in 0..10u64 {
        let m = rng.random_range(2..=5);
        let set = EtaSampler::new(900 + point, EtaConfig::new(m))
            .unwrap()
            .sample_set(150)
            .unwrap();
        let w: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
        let c: Vec<f64> = (0..m).map(|_| rng.random_range(-3.0..3.0)).collect();
        let (gw, gc) = nll_gradient(&set, &w, &c);
        let analytic: Vec<f64> = gw.iter().chain(&gc).copied().collect();
        let mut numeric = Vec::with_capacity(2 * m);
        for j in 0..2 * m {
            let (mut wp, mut cp, mut wm, mut cm) = (w.clone(), c.clone(), w.clone(), c.clone());
            if j < m {
                wp[j] += h;
                wm[j] -= h;
            } else {
                cp[j - m] += h;
                cm[j - m] -= h;
            }
            numeric.push((nll(&set, &wp, &cp) - nll(&set, &wm, &cm)) / (2.0 * h));
        }
        let diff: f64 = analytic.iter().zip(&numeric).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm: f64 = analytic.iter().map(|a| a * a).sum::<f64>().sqrt();
        worst = worst.max(diff / norm);
        let fitted = fit_vector_scaler(&set, ScalerConfig::default()).unwrap();
        nll_ok &= fitted.final_nll <= fitted.initial_nll;
    }
    outcome(
        worst <= 1e-4 && nll_ok,
        format!(
            "vector-scaler gradient: max relative error {worst:.2e} <= 1e-4 over 10 points (step 1e-5, L2 norm); fitted NLL <= initial on all 10 runs: {nll_ok}"
        ),
    )
}

fn criterion_10() -> Outcome {
    let set = SampleSet::from_parts(vec![vec![0.2; 5]; 4], &[0, 1, 2, 3]).unwrap();
    let grid = GridSpec::new(0.1, 5).with_max_points(10_000);
    let result = brute_force_fit(&set, &BuiltinMetric::Accuracy, &grid);
    let pass = matches!(
        result,
        Err(Error::ResourceLimit {
            requested: 14_641,
            cap: 10_000
        })
    );
    outcome(
        pass,
        format!("brute-force guard (m=5, eps=0.1, cap 1e4): {result:?}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(u32, fn() -> Outcome); 10] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
    ];
    let mut failed = 0;
    for (id, run) in criteria {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("[{}] {id:>2}. {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
