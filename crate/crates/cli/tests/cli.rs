use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-dca"))
        .args(args)
        .output()
        .unwrap()
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    serde_json::from_str(&ok(args)).unwrap()
}

/// Timings are the only part of a report that may change between runs.
fn mask_timings(text: &str) -> String {
    text.lines()
        .map(|l| match l.find("\"wall_seconds\":") {
            Some(i) => format!(
                "{}\"wall_seconds\": 0{}",
                &l[..i],
                if l.ends_with(',') { "," } else { "" }
            ),
            None => l.to_string(),
        })
        .collect::<Vec<_>>()
        .join("\n")
}

fn fails_with(args: &[&str], needle: &str) {
    let out = run(args);
    assert!(!out.status.success(), "{args:?} succeeded");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: "), "{err}");
    assert!(err.contains(needle), "{err}");
}

#[test]
fn train_output_matches_the_golden_file() {
    let small = fixture("small.libsvm");
    let test = fixture("small_test.libsvm");
    let args = [
        "train",
        "--data",
        small.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
        "--lambda",
        "0.1",
    ];
    let a = mask_timings(&ok(&args));
    let b = mask_timings(&ok(&args));
    assert_eq!(a, b);
    let golden = fixture("train_small.golden.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&golden, format!("{a}\n")).unwrap();
    }
    assert_eq!(format!("{a}\n"), std::fs::read_to_string(&golden).unwrap());
}

#[test]
fn reports_are_self_consistent() {
    let small = fixture("small.libsvm");
    let v = json(&[
        "train",
        "--data",
        small.to_str().unwrap(),
        "--penalty",
        "scad:theta=3,a=4",
        "--standardize",
    ]);
    let x = v["x"].as_array().unwrap();
    let support: Vec<usize> = x
        .iter()
        .enumerate()
        .filter(|(_, w)| w.as_f64().unwrap() != 0.0)
        .map(|(i, _)| i)
        .collect();
    assert_eq!(v["sf"].as_u64().unwrap() as usize, support.len());
    let listed: Vec<usize> = v["sf_indices"]
        .as_array()
        .unwrap()
        .iter()
        .map(|i| i.as_u64().unwrap() as usize)
        .collect();
    assert_eq!(listed, support);
    assert!(v["pwco_test"].is_null());
    assert_eq!(v["penalty"], "scad:theta=3,a=4");
}

#[test]
fn oracle_and_growing_theta_agree_on_a_line() {
    let tiny = fixture("tiny.libsvm");
    let v = json(&[
        "oracle",
        "--data",
        tiny.to_str().unwrap(),
        "--lambda",
        "0.05",
        "--update-theta",
    ]);
    assert!(v["gap"].as_f64().unwrap().abs() <= 1e-9, "{v}");
}

#[test]
fn oracle_refuses_wide_data() {
    let dir = tempfile::tempdir().unwrap();
    let wide = dir.path().join("wide.svm");
    let row = |y: &str, s: f64| {
        format!(
            "{y} {}\n",
            (1..=16).map(|j| format!("{j}:{s}")).collect::<Vec<_>>().join(" ")
        )
    };
    std::fs::write(&wide, row("+1", 1.0) + &row("-1", -1.0)).unwrap();
    fails_with(&["oracle", "--data", wide.to_str().unwrap()], "16 features");
}

#[test]
fn compare_has_one_row_per_pair() {
    let small = fixture("small.libsvm");
    let out = ok(&[
        "compare",
        "--data",
        small.to_str().unwrap(),
        "--penalty",
        "cap:theta=5",
        "--penalty",
        "exp:theta=5",
        "--penalty",
        "pil:theta=2,a=3",
        "--scheme",
        "dca1,dca2,dca4",
        "--starts",
        "2",
        "--format",
        "csv",
    ]);
    let mut rdr = csv::Reader::from_reader(out.as_bytes());
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 9);
    let status = rdr.headers().unwrap().iter().position(|h| h == "status").unwrap();
    let incompatible = rows.iter().filter(|r| &r[status] == "incompatible").count();
    // DCA4 takes PiL and nothing else, and PiL goes nowhere else.
    assert_eq!(incompatible, 4, "{out}");
}

#[test]
fn cv_is_deterministic_and_marks_one_best_cell() {
    let small = fixture("small.csv");
    let args = [
        "cv",
        "--data",
        small.to_str().unwrap(),
        "--grid-lambda",
        "0.05,0.2",
        "--grid-theta",
        "2,10",
        "--folds",
        "3",
        "--seed",
        "5",
    ];
    let a = mask_timings(&ok(&args));
    assert_eq!(a, mask_timings(&ok(&args)));
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert!(v["model"]["sf"].is_u64());
    let csv_out = ok(&[&args[..], &["--format", "csv"]].concat());
    assert_eq!(csv_out.lines().count(), 5);
    assert_eq!(csv_out.lines().filter(|l| l.ends_with(",true")).count(), 1);
}

#[test]
fn report_traces_every_iteration() {
    let small = fixture("small.libsvm");
    let out = ok(&["report", "--data", small.to_str().unwrap(), "--update-theta"]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("iteration,objective,iterate_change,theta"));
    let thetas: Vec<f64> = lines
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(!thetas.is_empty());
    assert!(thetas.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn out_flag_writes_the_same_text() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.csv");
    let tiny = fixture("tiny.libsvm");
    let printed = ok(&[
        "train",
        "--data",
        tiny.to_str().unwrap(),
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), printed);
}

#[test]
fn bad_requests_exit_nonzero() {
    let small = fixture("small.libsvm");
    let s = small.to_str().unwrap();
    fails_with(&["train", "--data", s, "--scheme", "dca4"], "dca4");
    fails_with(&["train", "--data", "no/such/file.svm"], "no/such/file.svm");
    fails_with(&["train", "--data", s, "--penalty", "cap:theta=-1"], "");
    fails_with(&["train", "--data", s, "--penalty", "bogus"], "");
    fails_with(&["train", "--data", s, "--scheme", "dca9"], "dca9");
    // Clap rejects unknown flags with its own message and code 2.
    let out = run(&["train", "--data", s, "--nope"]);
    assert_eq!(out.status.code(), Some(2));
}
