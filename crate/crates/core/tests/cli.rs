mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn cvbench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cvbench"))
        .args(args)
        .env_remove("CVBENCH_THREADS")
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = cvbench(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// Binary dataset with two sets, fitted with KNN and Ridge.
fn fitted(dir: &Path, extra: &[&str]) -> std::path::PathBuf {
    let data = dir.join("data.csv");
    common::write_binary_dataset_scaled(&data, 160, 24, 4, 6, 5, 0.35);
    let run = dir.join("run");
    let mut args = vec![
        "fit", "--data", s(&data), "--response", "Outcome", "--id", "CID", "--sets", "A:4,B:6",
        "--methods", "KNN,Ridge", "--nfolds", "5", "--m", "40", "--out", s(&run),
    ];
    args.extend_from_slice(extra);
    ok(&args);
    run
}

fn svg_count(dir: &Path, prefix: &str) -> usize {
    fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| {
            let name = e.file_name().to_string_lossy().to_string();
            name.starts_with(prefix) && name.ends_with(".svg")
        })
        .count()
}

#[test]
fn exit_codes() {
    assert_eq!(cvbench(&["--help"]).status.code(), Some(0));
    assert_eq!(cvbench(&["fit", "--data", "x.csv"]).status.code(), Some(2));
    assert_eq!(cvbench(&["nonsense"]).status.code(), Some(2));
    let missing = cvbench(&["fit", "--data", "/nonexistent/x.csv", "--response", "y"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).starts_with("error["));
}

#[test]
fn explicit_default_seeds_reproduce_default_run() {
    let tmp = TempDir::new().unwrap();
    let a = fitted(tmp.path(), &[]);
    let b_dir = tmp.path().join("b");
    fs::create_dir(&b_dir).unwrap();
    let b = fitted(&b_dir, &["--seeds", "11111,22222,33333"]);
    for f in ["predictions.csv", "folds.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn assess_writes_artifacts_and_rejects_bad_metric() {
    let tmp = TempDir::new().unwrap();
    let run = fitted(tmp.path(), &[]);
    ok(&["assess", "--run", s(&run)]);
    for f in ["measures.csv", "pairwise.csv", "anova_enhancement.txt", "mcs_enhancement.svg"] {
        assert!(run.join(f).exists(), "{f}");
    }
    common::svg_well_formed(&fs::read_to_string(run.join("mcs_enhancement.svg")).unwrap()).unwrap();
    ok(&["assess", "--run", s(&run), "--metric", "auc"]);
    assert!(run.join("mcs_auc.svg").exists());

    let bad = cvbench(&["assess", "--run", s(&run), "--metric", "rmse"]);
    assert_eq!(bad.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&bad.stderr);
    assert!(msg.contains("valid metrics") && msg.contains("auc"), "{msg}");

    ok(&["mcs", "--run", s(&run)]);
}

#[test]
fn curve_counts() {
    let tmp = TempDir::new().unwrap();
    let run = fitted(tmp.path(), &[]);
    ok(&["curves", "--run", s(&run)]);
    assert_eq!(svg_count(&run, "acc_methods_"), 6);
    ok(&["curves", "--run", s(&run), "--splits", "1", "--series", "descriptors"]);
    assert_eq!(svg_count(&run, "acc_descriptors_split1_"), 2);
    assert_eq!(svg_count(&run, "acc_descriptors_"), 2);
    for e in fs::read_dir(&run).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "svg") {
            common::svg_well_formed(&fs::read_to_string(&p).unwrap()).unwrap();
        }
    }
    let bad = cvbench(&["curves", "--run", s(&run), "--meths", "SVM"]);
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("KNN"));
}

#[test]
fn four_methods_give_four_descriptor_plots() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("data.csv");
    common::write_binary_dataset(&data, 120, 20, 3, 3, 8);
    let run = tmp.path().join("run");
    ok(&[
        "fit", "--data", s(&data), "--response", "Outcome", "--id", "CID", "--sets", "A:3,B:3",
        "--nfolds", "4", "--nsplits", "1", "--out", s(&run),
    ]);
    ok(&["curves", "--run", s(&run), "--splits", "1", "--series", "descriptors"]);
    assert_eq!(svg_count(&run, "acc_descriptors_split1_"), 4);
}

fn write_import(path: &Path, run: &Path, drop: Option<(usize, &str)>) {
    let ids: Vec<String> = fs::read_to_string(run.join("response.csv"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().to_string())
        .collect();
    let mut out = String::from("split,descriptor_set,method,id,prediction\n");
    for split in 1..=3 {
        for (i, id) in ids.iter().enumerate() {
            if drop == Some((split, id.as_str())) {
                continue;
            }
            out.push_str(&format!("{split},A,SVM,{id},{}\n", ((i * 7 + split) % 13) as f64 / 13.0));
        }
    }
    fs::write(path, out).unwrap();
}

#[test]
fn import_adds_one_combo_per_split() {
    let tmp = TempDir::new().unwrap();
    let run = fitted(tmp.path(), &[]);
    let before = fs::read_to_string(run.join("predictions.csv")).unwrap().lines().count();
    let file = tmp.path().join("svm.csv");
    write_import(&file, &run, None);
    ok(&["import", "--run", s(&run), "--file", s(&file)]);
    let after = fs::read_to_string(run.join("predictions.csv")).unwrap();
    assert_eq!(after.lines().count(), before + 3 * 160);
    let splits: std::collections::BTreeSet<&str> = after
        .lines()
        .filter(|l| l.contains(",A,SVM,"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(splits.len(), 3);
    let manifest = fs::read_to_string(run.join("manifest.json")).unwrap();
    assert!(manifest.contains("imported"));

    ok(&["assess", "--run", s(&run)]);
    let mcs = fs::read_to_string(run.join("mcs_enhancement.csv")).unwrap();
    assert!(mcs.lines().next().unwrap().contains("A-SVM"));

    let again = cvbench(&["import", "--run", s(&run), "--file", s(&file)]);
    assert_eq!(again.status.code(), Some(1));
}

#[test]
fn import_missing_id_is_named() {
    let tmp = TempDir::new().unwrap();
    let run = fitted(tmp.path(), &[]);
    let file = tmp.path().join("svm.csv");
    write_import(&file, &run, Some((2, "C1005")));
    let out = cvbench(&["import", "--run", s(&run), "--file", s(&file)]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("C1005") && msg.contains('2'), "{msg}");
    let preds = fs::read_to_string(run.join("predictions.csv")).unwrap();
    assert!(!preds.contains("SVM"));
}

#[test]
fn continuous_leave_one_out() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("cont.csv");
    common::write_continuous_dataset(&data, 30, 4, 3);
    let run = tmp.path().join("run");
    ok(&[
        "fit", "--data", s(&data), "--response", "y", "--nsplits", "1", "--nfolds", "30",
        "--methods", "KNN,Ridge", "--out", s(&run),
    ]);
    let folds = fs::read_to_string(run.join("folds.csv")).unwrap();
    let mut seen: Vec<&str> = folds.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    seen.sort_unstable();
    seen.dedup();
    assert_eq!(seen.len(), 30);

    let out = cvbench(&["assess", "--run", s(&run)]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least 2 splits"));
    ok(&["curves", "--run", s(&run), "--max-select", "10"]);
    assert_eq!(svg_count(&run, "acc_methods_split1_"), 1);
}

#[test]
fn continuous_default_metric_is_rmse() {
    let tmp = TempDir::new().unwrap();
    let data = tmp.path().join("cont.csv");
    common::write_continuous_dataset(&data, 60, 4, 4);
    let run = tmp.path().join("run");
    ok(&[
        "fit", "--data", s(&data), "--response", "y", "--nfolds", "5", "--methods", "KNN,Ridge",
        "--out", s(&run),
    ]);
    ok(&["assess", "--run", s(&run)]);
    assert!(run.join("mcs_rmse.svg").exists());
    let bad = cvbench(&["assess", "--run", s(&run), "--metric", "auc"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn thread_env_caps_flag() {
    let tmp = TempDir::new().unwrap();
    let run = fitted(tmp.path(), &["--threads", "4"]);
    let other = tmp.path().join("env");
    fs::create_dir(&other).unwrap();
    let data = tmp.path().join("data.csv");
    let out = Command::new(env!("CARGO_BIN_EXE_cvbench"))
        .args([
            "fit", "--data", s(&data), "--response", "Outcome", "--id", "CID", "--sets", "A:4,B:6",
            "--methods", "KNN,Ridge", "--nfolds", "5", "--m", "40", "--out", s(&other.join("run")),
        ])
        .env("CVBENCH_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(
        fs::read(run.join("predictions.csv")).unwrap(),
        fs::read(other.join("run/predictions.csv")).unwrap()
    );
    let bad = Command::new(env!("CARGO_BIN_EXE_cvbench"))
        .args(["fit", "--data", s(&data), "--response", "Outcome", "--out", s(&other.join("x"))])
        .env("CVBENCH_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("CVBENCH_THREADS"));
}

#[test]
fn defaults_prints_parameters() {
    let out = ok(&["defaults", "--n", "200", "--p", "16"]);
    for m in ["KNN", "Ridge", "Tree", "RF"] {
        assert!(out.contains(m), "{out}");
    }
}
