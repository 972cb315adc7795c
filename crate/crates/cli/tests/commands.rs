use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn reweigh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reweigh"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = reweigh(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&ok(args)).unwrap()
}

/// Exit code and the (single) diagnostic line.
fn fails(args: &[&str]) -> (i32, String) {
    let out = reweigh(args);
    assert!(!out.status.success(), "{args:?} unexpectedly succeeded");
    let stderr = String::from_utf8(out.stderr).unwrap();
    (out.status.code().unwrap(), stderr)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

struct Bench {
    dir: TempDir,
}

impl Bench {
    fn new(classes: usize, seed: u64) -> Self {
        let dir = TempDir::new().unwrap();
        ok(&[
            "synth",
            "--out",
            s(dir.path()),
            "--classes",
            &classes.to_string(),
            "--n-val",
            "600",
            "--n-test",
            "2000",
            "--seed",
            &seed.to_string(),
            "--shift-classes",
            "0,1",
        ]);
        Self { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }
}

#[test]
fn synth_is_deterministic() {
    let a = Bench::new(3, 11);
    let b = Bench::new(3, 11);
    for name in ["val.csv", "test.csv", "spec.json"] {
        assert_eq!(fs::read(a.path(name)).unwrap(), fs::read(b.path(name)).unwrap(), "{name}");
    }
    let c = Bench::new(3, 12);
    assert_ne!(fs::read(a.path("val.csv")).unwrap(), fs::read(c.path("val.csv")).unwrap());
}

#[test]
fn fit_writes_a_normalized_envelope() {
    let b = Bench::new(3, 1);
    let w = b.path("w.json");
    let report = json(&["fit", "--in", s(&b.path("val.csv")), "--metric", "f1_macro", "--out", s(&w), "--json"]);
    assert_eq!(report["search"], "line");
    assert_eq!(report["metric_evaluations"], 200);
    let envelope: Value = serde_json::from_str(&fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(envelope["kind"], "cwplugin");
    let weights: Vec<f64> = serde_json::from_value(envelope["weights"].clone()).unwrap();
    assert_eq!(weights.len(), 3);
    assert!((weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
}

#[test]
fn parallel_fit_gives_byte_identical_weights() {
    let b = Bench::new(5, 2);
    let (seq, par) = (b.path("seq.json"), b.path("par.json"));
    for metric in ["f1_macro", "accuracy", "gmean_macro"] {
        let val = b.path("val.csv");
        ok(&["fit", "--in", s(&val), "--metric", metric, "--out", s(&seq)]);
        ok(&["fit", "--in", s(&val), "--metric", metric, "--out", s(&par), "--parallel"]);
        assert_eq!(fs::read(&seq).unwrap(), fs::read(&par).unwrap(), "{metric}");
    }
}

#[test]
fn unimodal_search_is_refused_for_unflagged_metrics() {
    let b = Bench::new(3, 3);
    let w = b.path("w.json");
    let (code, stderr) = fails(&[
        "fit", "--in", s(&b.path("val.csv")), "--metric", "f1_macro", "--search", "unimodal", "--out", s(&w),
    ]);
    assert_eq!(code, 2);
    assert_eq!(stderr.lines().count(), 1);
    assert!(stderr.contains("quasi-concave"), "{stderr}");
    assert!(!w.exists());
    ok(&["fit", "--in", s(&b.path("val.csv")), "--metric", "accuracy", "--search", "unimodal", "--out", s(&w)]);
}

#[test]
fn apply_then_eval_reproduces_the_fit_value() {
    let b = Bench::new(4, 4);
    let (val, w, labels) = (b.path("val.csv"), b.path("w.json"), b.path("labels.csv"));
    let metric = "linear_diag:0.4,0.3,0.2,0.1";
    let report = json(&["fit", "--in", s(&val), "--metric", metric, "--out", s(&w), "--json"]);
    ok(&["apply", "--in", s(&val), "--weights", s(&w), "--out", s(&labels)]);
    let table = json(&["eval", "--in", s(&val), "--metric", metric, "--predicted", s(&labels), "--weights", s(&w), "--json"]);
    let row = &table["rows"][0];
    assert_eq!(row["predicted"], report["value"]);
    assert_eq!(row["weighted"], report["value"]);
    assert_eq!(row["metric"], metric);
}

#[test]
fn uniform_envelope_matches_raw_argmax() {
    let b = Bench::new(3, 5);
    let w = b.path("uniform.json");
    fs::write(
        &w,
        r#"{"kind":"cwplugin","m":3,"weights":[1,1,1],"metric_name":"uniform","epsilon":0.0,
            "rho":0.0,"reference_class":2,"search_mode":"line",
            "metadata":{"n":0,"evaluations":0,"version":"0.1.0"}}"#,
    )
    .unwrap();
    let table = json(&["eval", "--in", s(&b.path("test.csv")), "--weights", s(&w), "--json"]);
    let rows = table["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 5);
    for row in rows {
        assert_eq!(row["clean"], row["weighted"], "{row}");
        assert_eq!(row["predicted"], Value::Null);
    }
}

#[test]
fn perfect_predictions_score_one() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("perfect.csv");
    fs::write(&path, "p_0,p_1,p_2,label\n0.8,0.1,0.1,0\n0.1,0.7,0.2,1\n0.2,0.2,0.6,2\n0.9,0.05,0.05,0\n").unwrap();
    let table = json(&["eval", "--in", s(&path), "--json"]);
    for row in table["rows"].as_array().unwrap() {
        if row["metric"] == "accuracy" || row["metric"] == "f1_macro" {
            assert_eq!(row["clean"], 1.0);
        }
    }
}

#[test]
fn resampled_eval_has_the_table_shape() {
    let b = Bench::new(3, 6);
    let (test, val) = (b.path("test.csv"), b.path("val.csv"));
    let args = [
        "eval", "--in", s(&test), "--pool", s(&val), "--metric", "f1_macro",
        "--val-size", "60", "--seed", "9", "--json",
    ];
    let table = json(&args);
    assert_eq!(table["repeats"], 5);
    let rows = table["rows"].as_array().unwrap();
    let methods: Vec<&str> = rows.iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert_eq!(methods, ["clean", "vector_scaler", "plugin"]);
    for row in rows {
        assert_eq!(row["values"].as_array().unwrap().len(), 5);
        assert!(row["std"].as_f64().unwrap() >= 0.0);
    }
    assert_eq!(rows[0]["std"], 0.0);
    assert_eq!(json(&args), table);
    let (code, _) = fails(&["eval", "--in", s(&test), "--pool", s(&val)]);
    assert_eq!(code, 2);
}

#[test]
fn input_errors_are_data_errors_with_line_numbers() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("w.json");
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "p_0,p_1,label\n0.5,0.5,0\n0.4,0.4,1\n").unwrap();
    let (code, stderr) = fails(&["fit", "--in", s(&bad), "--metric", "accuracy", "--out", s(&out)]);
    assert_eq!(code, 3);
    assert!(stderr.contains("line 3"), "{stderr}");
    assert_eq!(stderr.lines().count(), 1);

    let near = dir.path().join("near.csv");
    fs::write(&near, "p_0,p_1,label\n0.5000004,0.5,0\n0.2,0.8,1\n").unwrap();
    ok(&["fit", "--in", s(&near), "--metric", "accuracy", "--out", s(&out)]);

    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "p_0,p_1,label\n").unwrap();
    let labels = dir.path().join("labels.csv");
    let (code, _) = fails(&["apply", "--in", s(&empty), "--weights", s(&out), "--out", s(&labels)]);
    assert_eq!(code, 3);
    assert!(!labels.exists());
}

#[test]
fn weights_file_errors() {
    let b = Bench::new(3, 7);
    let (val, w) = (b.path("val.csv"), b.path("w.json"));
    ok(&["fit", "--in", s(&val), "--metric", "accuracy", "--out", s(&w)]);
    let text = fs::read_to_string(&w).unwrap();

    let wrong_m = b.path("wrong_m.json");
    fs::write(&wrong_m, text.replace("\"m\": 3", "\"m\": 4")).unwrap();
    let (code, stderr) = fails(&["apply", "--in", s(&val), "--weights", s(&wrong_m)]);
    assert_eq!(code, 3);
    assert!(stderr.contains("m = 4"), "{stderr}");

    let truncated = b.path("truncated.json");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let (code, _) = fails(&["apply", "--in", s(&val), "--weights", s(&truncated)]);
    assert_eq!(code, 3);

    let four = b.path("four.csv");
    fs::write(&four, "p_0,p_1,p_2,p_3\n0.25,0.25,0.25,0.25\n").unwrap();
    let (code, stderr) = fails(&["apply", "--in", s(&four), "--weights", s(&w)]);
    assert_eq!(code, 3);
    assert!(stderr.contains("3 classes"), "{stderr}");
}

#[test]
fn vector_scaler_envelopes_apply() {
    let b = Bench::new(3, 8);
    let (val, w) = (b.path("val.csv"), b.path("vs.json"));
    let report = json(&["fit", "--in", s(&val), "--metric", "accuracy", "--method", "vector-scaler", "--out", s(&w), "--json"]);
    assert!(report["final_nll"].as_f64().unwrap() <= report["initial_nll"].as_f64().unwrap());
    let envelope: Value = serde_json::from_str(&fs::read_to_string(&w).unwrap()).unwrap();
    assert_eq!(envelope["kind"], "vector_scaler");
    let table = json(&["eval", "--in", s(&val), "--metric", "accuracy", "--weights", s(&w), "--json"]);
    assert_eq!(table["rows"][0]["weighted"], report["value"]);
}

#[test]
fn bench_confirms_the_count_law() {
    let rows = json(&["bench", "--classes", "4", "--epsilons", "0.01,0.005", "--n", "800", "--json"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        assert_eq!(row["ok"], true, "{row}");
    }
    let count = |eps: f64, generator: &str, search: &str| {
        rows.iter()
            .find(|r| r["epsilon"] == eps && r["generator"] == generator && r["search"] == search)
            .map(|r| r["evaluations"].as_u64().unwrap())
            .unwrap()
    };
    assert_eq!(count(0.01, "balanced", "line"), 300);
    assert!(count(0.01, "balanced", "unimodal") <= 48);
    assert_eq!(count(0.005, "worst_case", "line"), 600);
}

#[test]
fn elicit_reports_one_row_per_size() {
    let rows = json(&["elicit", "--metric", "linear_diag:0.5,0.3,0.2", "--n", "200,5000", "--epsilon", "0.01", "--json"]);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["n"], 5000);
    assert!(rows[0]["bound_rhs"].as_f64().unwrap() > rows[1]["bound_rhs"].as_f64().unwrap());
    let (code, _) = fails(&["elicit", "--metric", "accuracy"]);
    assert_eq!(code, 2);
}

#[test]
fn oversized_grids_are_resource_errors() {
    let (code, stderr) = fails(&["elicit", "--metric", "linear_diag:0.5,0.5", "--epsilon", "0.0000000001", "--n", "10"]);
    assert_eq!(code, 4);
    assert!(stderr.contains("exceeds the cap"), "{stderr}");
}
