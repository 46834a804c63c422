//! Command-line contracts: exit codes, diagnostics and file contents.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use behavior_filter::data_model::load_recording;
use behavior_filter::features::FeatureMatrix;

fn bin(args: &[&str], out_dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_behavior-filter"))
        .args(args)
        .arg("--out-dir")
        .arg(out_dir)
        .output()
        .unwrap()
}

fn ok(args: &[&str], out_dir: &Path) {
    let out = bin(args, out_dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// A short synthetic recording; returns (recording, labels).
fn synth(dir: &Path, seconds: &str) -> (PathBuf, PathBuf) {
    let d = dir.join("synth");
    ok(&["--seed", "1", "synth", "--duration-s", seconds], &d);
    (d.join("recording.csv"), d.join("labels.csv"))
}

fn data_lines(p: &Path) -> Vec<String> {
    std::fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(String::from)
        .collect()
}

#[test]
fn raw_without_outliers_reproduces_input() {
    let tmp = tempfile::tempdir().unwrap();
    let (rec, lab) = synth(tmp.path(), "30");
    let out = tmp.path().join("pre");
    ok(
        &["preprocess", "--recording", s(&rec), "--labels", s(&lab), "--filter-mode", "uniform:raw", "--outlier", "none"],
        &out,
    );
    let got = out.join("preprocessed.csv");
    assert_eq!(data_lines(&got), data_lines(&rec));
    assert_eq!(
        load_recording(&got, 50.0).unwrap().samples(),
        load_recording(&rec, 50.0).unwrap().samples()
    );
    let report = std::fs::read_to_string(out.join("outlier_report.csv")).unwrap();
    assert!(report.contains("method,none") && report.contains("drop_rate_pct,0"), "{report}");
}

#[test]
fn routed_filter_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (rec, lab) = synth(tmp.path(), "60");
    let out = tmp.path().join("pre");
    ok(
        &["preprocess", "--recording", s(&rec), "--labels", s(&lab), "--filter-mode", "behavior:wavelet:lpf"],
        &out,
    );
    assert!(out.join("outlier_report.csv").exists());
    assert_eq!(load_recording(out.join("preprocessed.csv"), 50.0).unwrap().len(), 3000);
}

#[test]
fn bad_filter_token_is_named() {
    let tmp = tempfile::tempdir().unwrap();
    let (rec, lab) = synth(tmp.path(), "10");
    for (spec, token) in [("behavior:wavelet:lfp", "lfp"), ("uniform:lpf:cutof=3", "cutof=3"), ("sideways:raw", "sideways")] {
        let out = bin(
            &["preprocess", "--recording", s(&rec), "--labels", s(&lab), "--filter-mode", spec],
            &tmp.path().join("bad"),
        );
        assert!(!out.status.success());
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(&format!("`{token}`")), "{spec}: {err}");
    }
}

#[test]
fn two_windows_give_two_rows() {
    let tmp = tempfile::tempdir().unwrap();
    // 3 s at 50 Hz with 1.5 s windows; one behavior throughout
    let (rec, lab) = synth(tmp.path(), "3");
    std::fs::write(&lab, "start_ms,end_ms,behavior\n0,3000,Eating\n").unwrap();
    let out = tmp.path().join("feat");
    ok(&["featurize", "--recording", s(&rec), "--labels", s(&lab)], &out);
    let m = FeatureMatrix::load(&out.join("features.csv")).unwrap();
    assert_eq!((m.n_rows(), m.n_features()), (2, 104));
    let header = data_lines(&out.join("features.csv"))[0].clone();
    assert_eq!(header.split(',').count(), 106);
}

fn features(tmp: &Path) -> PathBuf {
    let (rec, lab) = synth(tmp, "240");
    let pre = tmp.join("pre");
    ok(&["preprocess", "--recording", s(&rec), "--labels", s(&lab)], &pre);
    let feat = tmp.join("feat");
    ok(&["featurize", "--recording", s(&pre.join("preprocessed.csv")), "--labels", s(&lab)], &feat);
    feat.join("features.csv")
}

#[test]
fn train_then_evaluate_is_repeatable() {
    let tmp = tempfile::tempdir().unwrap();
    let feats = features(tmp.path());
    let mut reports = Vec::new();
    for run in ["one", "two"] {
        let t = tmp.path().join(run).join("train");
        let e = tmp.path().join(run).join("eval");
        ok(&["--seed", "3", "train", "--features", s(&feats), "--model", "rf"], &t);
        ok(&["--seed", "3", "evaluate", "--model", s(&t.join("model.json")), "--features", s(&feats)], &e);
        let files: Vec<Vec<u8>> = ["metrics.csv", "confusion.csv", "report.txt"]
            .iter()
            .map(|f| std::fs::read(e.join(f)).unwrap())
            .collect();
        reports.push((files, std::fs::read(t.join("model.json")).unwrap()));
    }
    assert_eq!(reports[0], reports[1]);
    let metrics = String::from_utf8(reports[0].0[0].clone()).unwrap();
    assert!(metrics.starts_with("# config_sha256="), "{metrics}");
    assert!(metrics.contains("\naccuracy,"));
}

#[test]
fn evaluate_rejects_wrong_feature_count() {
    let tmp = tempfile::tempdir().unwrap();
    let feats = features(tmp.path());
    let t = tmp.path().join("train");
    ok(&["train", "--features", s(&feats), "--model", "nb"], &t);

    // drop the first feature column
    let text = std::fs::read_to_string(&feats).unwrap();
    let cut: String = text
        .lines()
        .map(|l| if l.starts_with('#') { l.to_string() } else { l.split_once(',').unwrap().1.to_string() })
        .map(|l| l + "\n")
        .collect();
    let narrow = tmp.path().join("narrow.csv");
    std::fs::write(&narrow, cut).unwrap();

    let out = bin(
        &["evaluate", "--model", s(&t.join("model.json")), "--features", s(&narrow)],
        &tmp.path().join("eval"),
    );
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("shape mismatch: expected 104 columns, got 103"), "{err}");
}

#[test]
fn compare_grid_shape() {
    let tmp = tempfile::tempdir().unwrap();
    // nearly noise-free, so the classes are separable
    let cfg = tmp.path().join("quiet.toml");
    std::fs::write(
        &cfg,
        "seed = 2\n[synth]\nduration_s = 240.0\nnoise_active = 0.01\nnoise_inactive = 0.01\nnoise_jitter = 0.0\n",
    )
    .unwrap();
    let d = tmp.path().join("synth");
    ok(&["--config", s(&cfg), "synth"], &d);
    let (rec, lab) = (d.join("recording.csv"), d.join("labels.csv"));
    let out = tmp.path().join("cmp");
    ok(
        &[
            "compare", "--recording", s(&rec), "--labels", s(&lab), "--models", "dt", "--filter", "raw",
            "--no-outlier-table", "--config", s(&cfg),
        ],
        &out,
    );
    let grid = data_lines(&out.join("compare_accuracy.csv"));
    assert_eq!(grid[0], "method,DT,Average");
    assert_eq!(grid.len(), 2);
    let cells: Vec<f64> = grid[1].split(',').skip(1).map(|v| v.parse().unwrap()).collect();
    assert!(cells[0] >= 0.97, "{cells:?}");
    assert_eq!(cells[0], cells[1]);
    assert!(!out.join("compare_outliers.csv").exists());

    let out = tmp.path().join("cmp2");
    ok(
        &[
            "compare", "--recording", s(&rec), "--labels", s(&lab), "--models", "nb,knn", "--filter", "tvd+median",
            "--filter", "lpf", "--filter", "raw", "--select", "0",
        ],
        &out,
    );
    let grid = data_lines(&out.join("compare_accuracy.csv"));
    assert_eq!(grid[0], "method,NB,KNN,Average");
    let methods: Vec<&str> = grid[1..].iter().map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(methods, ["TVD + Median", "LPF", "Raw data"]);
    for line in &grid[1..] {
        for v in line.split(',').skip(1) {
            let v: f64 = v.parse().unwrap();
            assert!((0.0..=1.0).contains(&v));
        }
    }
    let prf = data_lines(&out.join("compare_prf.csv"));
    assert_eq!(prf[0], "method,precision,recall,f1");
    assert_eq!(prf.len(), 4);
    let outliers = data_lines(&out.join("compare_outliers.csv"));
    assert_eq!(outliers[0], "metric,IQR,Hampel");
    assert!(outliers.iter().any(|l| l.starts_with("drop_rate_pct,")));
}

#[test]
fn persisted_config_reproduces_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("a");
    ok(&["--seed", "9", "synth", "--duration-s", "20", "--spike-rate", "0.02"], &first);
    let second = tmp.path().join("b");
    ok(&["--config", s(&first.join("config.toml")), "synth"], &second);
    for f in ["config.toml", "recording.csv", "labels.csv", "truth_spikes.csv", "truth_clean.csv"] {
        assert_eq!(std::fs::read(first.join(f)).unwrap(), std::fs::read(second.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn inputs_are_not_modified() {
    let tmp = tempfile::tempdir().unwrap();
    let (rec, lab) = synth(tmp.path(), "30");
    let before = (std::fs::read(&rec).unwrap(), std::fs::read(&lab).unwrap());
    ok(&["preprocess", "--recording", s(&rec), "--labels", s(&lab)], &tmp.path().join("pre"));
    assert_eq!(before, (std::fs::read(&rec).unwrap(), std::fs::read(&lab).unwrap()));
}

#[test]
fn missing_input_fails_with_path() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin(&["featurize", "--recording", "nope.csv", "--labels", "nope2.csv"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.csv"));
}
