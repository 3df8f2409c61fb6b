use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polarimeter"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&out.stdout));
    })
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, body).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn index_prints_the_value() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.csv", "pi,y\n1,0\n1,2\n");
    let out = run(&["index", "--dist", s(&a), "--alpha", "1", "--alienation", "linear"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["P"], 4.0);
    assert_eq!(v["seed"], 0);
    assert_eq!(v["alienation"], "linear");
}

#[test]
fn json_distribution_and_spec_flag() {
    let dir = TempDir::new().unwrap();
    let a = write(&dir, "a.json", r#"{"pi":[2,2],"y":[0,1]}"#);
    let out = run(&["index", "--dist", s(&a), "--spec", "alpha=1,power:2"]);
    assert!(out.status.success());
    // 2 * 2·2·2^1·1
    assert_eq!(json(&out)["P"], 16.0);
}

#[test]
fn compare_and_sweep() {
    let dir = TempDir::new().unwrap();
    let d1 = write(&dir, "d1.csv", "pi,y\n10,0\n10,1\n10,2\n");
    let d2 = write(&dir, "d2.csv", "pi,y\n10,0\n5,0.1\n5,1.9\n10,2\n");
    let out = run(&["compare", "--dist", s(&d1), "--dist2", s(&d2), "--alpha", "1"]);
    assert_eq!(json(&out)["ordering"], "FirstHigher");

    let out = run(&["sweep", "--dist", s(&d1), "--dist2", s(&d2), "--alienation", "linear"]);
    let v = json(&out);
    let crossovers = v["crossovers"].as_array().unwrap();
    assert_eq!(crossovers.len(), 1);
    let alpha = crossovers[0]["alpha"].as_f64().unwrap();
    assert!(alpha > 0.0 && alpha <= 1.0);

    let out = run(&[
        "sweep",
        "--dist",
        s(&d1),
        "--dist2",
        s(&d2),
        "--format",
        "csv",
        "--grid",
        "8",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("seed,alienation,alpha,p1,p2,ordering"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn thresholds_report_alpha_star() {
    let out = run(&["thresholds", "--bound", "2", "--tol", "0.01"]);
    assert!(out.status.success());
    let v = json(&out);
    let a = v["alpha_critical"].as_f64().unwrap();
    assert!((1.55..=1.65).contains(&a));
    assert!(v["m_alpha_samples"].as_array().unwrap().len() > 2);

    let out = run(&[
        "thresholds",
        "--alienation",
        "power:2",
        "--tol",
        "0.01",
        "--format",
        "csv",
    ]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("seed,alpha,m_alpha\n"));
}

#[test]
fn strict_gini_axioms_exit_one() {
    let out = run(&["axioms", "--spec", "alpha=0,linear", "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let reports = v["reports"].as_array().unwrap();
    let direct = reports
        .iter()
        .find(|r| r["axiom"] == "Axiom1" && r["mode"] == "Direct")
        .unwrap();
    assert_eq!(direct["verdict"], "Fail");
    assert!(!direct["witnesses"].as_array().unwrap().is_empty());
    for r in reports.iter().filter(|r| r["axiom"] != "Axiom1") {
        assert_ne!(r["verdict"], "Fail", "{r}");
    }

    let lenient = run(&["axioms", "--spec", "alpha=0,linear"]);
    assert_eq!(lenient.status.code(), Some(0));
    let passing = run(&["axioms", "--spec", "alpha=1,linear", "--strict", "--axiom", "1"]);
    assert_eq!(passing.status.code(), Some(0));
}

#[test]
fn output_is_deterministic_for_a_seed() {
    let args = [
        "axioms",
        "--spec",
        "alpha=1,power:0.7",
        "--seed",
        "7",
        "--samples",
        "200",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 7);
    let single = bin().args(args).env("POLARIMETER_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, single.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let target = dir.path().join("report.csv");
    let out = run(&[
        "experiments",
        "--experiment",
        "middle-class",
        "--format",
        "csv",
        "--out",
        s(&target),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = fs::read_to_string(target).unwrap();
    assert!(text.starts_with("seed,experiment,md,alienation,crossover_alpha"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn errors_exit_two_with_context() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.csv", "pi,y\n1.5,0\n1,1\n");
    let out = run(&["index", "--dist", s(&bad), "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("bad.csv:2:"), "{err}");

    let out = run(&["index", "--dist", s(&dir.path().join("missing.csv")), "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));

    let good = write(&dir, "good.csv", "pi,y\n1,0\n1,1\n");
    let out = run(&["index", "--dist", s(&good), "--alpha", "1", "--alienation", "cubic"]);
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["index", "--dist", s(&good), "--alpha", "1"])
        .env("POLARIMETER_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn table_descriptor_reads_file() {
    let dir = TempDir::new().unwrap();
    let table = write(&dir, "f.csv", "d,f\n0,0\n1,1\n3,5\n");
    let dist = write(&dir, "d.csv", "pi,y\n1,0\n1,2\n");
    let descriptor = format!("table:{}", s(&table));
    let out = run(&["index", "--dist", s(&dist), "--alpha", "0", "--alienation", &descriptor]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // f(2) = 3 on the middle segment, counted from both sides
    assert_eq!(json(&out)["P"], 6.0);
}
