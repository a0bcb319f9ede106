use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn stress_field_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("field.csv");
    let summary = dir.path().join("summary.json");
    let out = run(&[
        "stress-field", "--energy", "composite3d", "--map", "phi3d", "--c", "4.7182818", "--n", "10000", "--seed",
        "42", "--out", csv.to_str().unwrap(), "--summary", summary.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("x1,x2,x3,detF,s11"));
    assert_eq!(lines.count(), 10_000);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(&summary).unwrap()).unwrap();
    assert_eq!(s["homogeneous"], Value::Bool(true));
}

#[test]
fn stress_field_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let paths = [dir.path().join("a.csv"), dir.path().join("b.csv")];
    for p in &paths {
        let out = run(&["stress-field", "--energy", "composite2d", "--map", "phi2d", "--n", "500", "--out", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&paths[0]).unwrap(), std::fs::read(&paths[1]).unwrap());
}

#[test]
fn widened_annulus_fails_verification() {
    let out = run(&["stress-field", "--energy", "composite3d", "--map", "phi3d", "--r-min", "0.5", "--r-max", "1.0", "--n", "1000"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn iso3d_is_strictly_elliptic() {
    let out = run(&["check-convexity", "--energy", "iso3d", "--samples", "10000", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "strictly-elliptic");
}

#[test]
fn jump_of_conformal_pair_has_rank_two() {
    let out = run(&["jump-check", "--f1", "1,0,0,1", "--f2", "2,0,0,2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["rank"], 2);
}

#[test]
fn other_subcommands_succeed() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("grid.svg");
    for args in [
        vec!["check-conformal", "--map", "phi2d"],
        vec!["render-grid", "--map", "phi2d", "--out", svg.to_str().unwrap()],
        vec!["linearized-demo"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["stress-field", "--energy", "iso4d", "--map", "phi2d"],
        vec!["stress-field", "--energy", "composite2d", "--map", "phi2d", "--c", "1.0"],
        vec!["stress-field", "--energy", "iso3d", "--map", "phi2d"],
        vec!["jump-check", "--f1", "1,0,0"],
        vec!["no-such-command"],
    ] {
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}
