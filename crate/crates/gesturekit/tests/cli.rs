//! The `gesturekit` binary run as a subprocess.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gesturekit::corpus::load_corpus;
use gesturekit::format::MiDoc;

fn gesturekit(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gesturekit"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn ok(args: &[&str], cwd: &Path) -> String {
    let out = gesturekit(args, cwd);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn sorted_files(dir: &Path) -> Vec<PathBuf> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir).unwrap().map(|e| e.unwrap().path()).collect();
    files.sort();
    files
}

#[test]
fn synth_is_deterministic_and_valid() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |out| {
        [
            "synth", "--family", "zigzag", "--turns", "8", "--reps", "17", "--seed", "7", "-o", out,
        ]
    };
    ok(&args("a"), tmp.path());
    ok(&args("b"), tmp.path());
    let (a, b) = (sorted_files(&tmp.path().join("a")), sorted_files(&tmp.path().join("b")));
    assert_eq!(a.len(), 17);
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.file_name(), y.file_name());
        assert_eq!(fs::read(x).unwrap(), fs::read(y).unwrap());
    }
    let corpus = load_corpus(&tmp.path().join("a")).unwrap();
    assert!(corpus.failures.is_empty());
    assert_eq!(corpus.traces.len(), 17);
    assert_eq!(corpus.traces[0].meta.gesture_id, "zigzag8");

    ok(
        &[
            "synth",
            "--family",
            "circle",
            "--fingers",
            "3",
            "--reps",
            "2",
            "--id",
            "tri",
            "-o",
            "c",
        ],
        tmp.path(),
    );
    let c = load_corpus(&tmp.path().join("c")).unwrap();
    assert!(c
        .traces
        .iter()
        .all(|t| t.finger_count() == 3 && t.meta.gesture_id == "tri"));
}

#[test]
fn synth_rejects_bad_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        &["synth", "--jitter", "0.7", "-o", "x"][..],
        &["synth", "--reps", "18", "-o", "x"],
        &["synth", "--family", "spiral", "-o", "x"],
    ] {
        let out = gesturekit(args, tmp.path());
        assert!(!out.status.success(), "{args:?}");
    }
}

#[test]
fn analyze_lists_bad_files_and_continues() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        &[
            "synth",
            "--gestures",
            "3",
            "--reps",
            "12",
            "--seed",
            "2",
            "-o",
            "corpus",
        ],
        tmp.path(),
    );
    fs::write(tmp.path().join("corpus/broken.json"), "{\"gesture_id\": 3").unwrap();
    let out = gesturekit(&["analyze", "corpus", "-o", "rep"], tmp.path());
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("broken.json"));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("g01-line") && stdout.contains("3 gestures"));
    let failures = fs::read_to_string(tmp.path().join("rep/failures.csv")).unwrap();
    assert_eq!(failures.lines().count(), 2);
    assert_eq!(
        fs::read_to_string(tmp.path().join("rep/summary.csv"))
            .unwrap()
            .lines()
            .count(),
        4
    );
    let reps = fs::read_to_string(tmp.path().join("rep/mi_vs_repetition.csv")).unwrap();
    assert_eq!(reps.lines().count(), 1 + 3 * 12);
    assert!(tmp.path().join("rep/gestures/g02-circle.json").exists());

    let json: serde_json::Value =
        serde_json::from_str(&ok(&["analyze", "corpus", "-o", "rep2", "--json"], tmp.path())).unwrap();
    assert_eq!(json["gestures"].as_array().unwrap().len(), 3);
    assert_eq!(json["failures"].as_array().unwrap().len(), 1);
}

#[test]
fn array_file_and_directory_give_the_same_report() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        &["synth", "--gestures", "2", "--reps", "11", "--seed", "3", "-o", "dir"],
        tmp.path(),
    );
    let items: Vec<serde_json::Value> = sorted_files(&tmp.path().join("dir"))
        .iter()
        .map(|p| serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap())
        .collect();
    fs::write(tmp.path().join("all.json"), serde_json::to_string(&items).unwrap()).unwrap();
    ok(&["analyze", "dir", "-o", "r1"], tmp.path());
    ok(&["analyze", "all.json", "-o", "r2"], tmp.path());
    for name in [
        "summary.csv",
        "mi_vs_repetition.csv",
        "duration_vs_repetition.csv",
        "mi_histogram.csv",
    ] {
        assert_eq!(
            fs::read(tmp.path().join("r1").join(name)).unwrap(),
            fs::read(tmp.path().join("r2").join(name)).unwrap()
        );
    }
}

#[test]
fn fatal_errors_exit_nonzero() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(!gesturekit(&["analyze", "missing"], tmp.path()).status.success());
    fs::create_dir(tmp.path().join("empty")).unwrap();
    assert!(!gesturekit(&["analyze", "empty"], tmp.path()).status.success());
    fs::write(tmp.path().join("bad.toml"), "port = \"x\"").unwrap();
    let out = gesturekit(&["--config", "bad.toml", "analyze", "empty"], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml"));
}

#[test]
fn roc_writes_one_row_per_count() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        &[
            "synth",
            "--gestures",
            "3",
            "--reps",
            "17",
            "--seed",
            "4",
            "--shape-sigma",
            "80",
            "-o",
            "c",
        ],
        tmp.path(),
    );
    let stdout = ok(
        &["roc", "c", "--templates", "2,4", "--set", "recall2", "-o", "roc"],
        tmp.path(),
    );
    assert!(stdout.contains("eer %"));
    let rows = fs::read_to_string(tmp.path().join("roc/eer_by_templates.csv")).unwrap();
    assert_eq!(rows.lines().count(), 3);
    assert!(rows.lines().nth(1).unwrap().starts_with("2,"));
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("roc/roc.json")).unwrap()).unwrap();
    assert_eq!(json["trial_set"], "recall2");
    assert_eq!(json["rows"][1]["n_genuine"], 15);

    // Ten Generate repetitions are required for ten templates.
    ok(&["synth", "--gestures", "2", "--reps", "8", "-o", "short"], tmp.path());
    assert!(!gesturekit(&["roc", "short", "--templates", "10"], tmp.path())
        .status
        .success());
}

#[test]
fn mi_command() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        &[
            "synth",
            "--family",
            "signature",
            "--reps",
            "2",
            "--sigma",
            "0.5",
            "--id",
            "s",
            "-o",
            "one",
        ],
        tmp.path(),
    );
    ok(
        &[
            "synth",
            "--family",
            "signature",
            "--fingers",
            "2",
            "--reps",
            "1",
            "--id",
            "d",
            "-o",
            "two",
        ],
        tmp.path(),
    );
    let doc: MiDoc =
        serde_json::from_str(&ok(&["mi", "one/s_t01.json", "one/s_t02.json", "--json"], tmp.path())).unwrap();
    assert!(doc.total_bits > 10.0, "{doc:?}");
    assert_eq!(doc.components.len(), doc.retained_k);
    assert!(ok(&["mi", "one/s_t01.json", "one/s_t02.json"], tmp.path()).starts_with("total "));

    let out = gesturekit(&["mi", "one/s_t01.json", "two/d_t01.json"], tmp.path());
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("incomparable"));
}

#[test]
fn config_file_is_honoured() {
    let tmp = tempfile::tempdir().unwrap();
    ok(
        &[
            "synth", "--family", "zigzag", "--reps", "2", "--sigma", "0.5", "--id", "z", "-o", "c",
        ],
        tmp.path(),
    );
    let args = ["mi", "c/z_t01.json", "c/z_t02.json", "--json"];
    let default: MiDoc = serde_json::from_str(&ok(&args, tmp.path())).unwrap();
    fs::write(tmp.path().join("loose.toml"), "mse_cutoff_fraction = 0.5\n").unwrap();
    let mut with_config = vec!["--config", "loose.toml"];
    with_config.extend(args);
    let loose: MiDoc = serde_json::from_str(&ok(&with_config, tmp.path())).unwrap();
    assert!(loose.retained_k <= default.retained_k);
    assert_eq!(loose.retained_k, 1);
}
