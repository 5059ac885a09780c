use std::path::Path;
use std::process::{Command, Output};

use exdist_cli::catalog::catalog;
use exdist_cli::ExperimentConfig;

fn exdist(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_exdist")).args(args).current_dir(cwd).output().expect("binary runs")
}

const REQUIRED: [&str; 14] = [
    "annulus-2d",
    "ring-reciprocal",
    "square-ring",
    "eggyolk-random",
    "eggyolk-empty",
    "point-null",
    "distortion-stretch",
    "ring-qc",
    "disk-qh",
    "shadow-sum",
    "cned-circle",
    "translation-survey",
    "cantor-product-probe",
    "empty-family",
];

#[test]
fn list_shows_the_catalog() {
    let dir = tempfile::tempdir().unwrap();
    let out = exdist(&["list"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().filter_map(|l| l.split_whitespace().next()).collect();
    assert!(names.len() >= 12);
    for want in REQUIRED {
        assert!(names.contains(&want), "{want} missing from list");
    }
}

#[test]
fn every_entry_validates_and_round_trips() {
    for c in catalog() {
        c.validate().unwrap_or_else(|e| panic!("{}: {e}", c.name));
        assert!(!c.anchor.is_empty(), "{} has no anchor", c.name);
        assert_eq!(ExperimentConfig::parse(&c.to_json()).unwrap(), c);
    }
}

#[test]
fn show_output_is_a_runnable_config() {
    let dir = tempfile::tempdir().unwrap();
    let out = exdist(&["show", "rectangle"], dir.path());
    assert!(out.status.success());
    let cfg = ExperimentConfig::parse(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(cfg.name, "rectangle");
}

fn read(p: &Path) -> Vec<u8> {
    std::fs::read(p).unwrap_or_else(|e| panic!("{}: {e}", p.display()))
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("small.json");
    std::fs::write(
        &cfg,
        r#"{
  "name": "small-rectangle",
  "kind": "modulus",
  "params": {"study": "solve", "scene": {"shape": "rectangle", "length": 2, "width": 1, "cells": 24}, "accuracy": 0.2}
}"#,
    )
    .unwrap();
    for out in ["a", "b"] {
        let o = exdist(&["run", "small.json", "--out", out], dir.path());
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for f in ["results.json", "data.csv", "figure.svg"] {
        let a = read(&dir.path().join("a").join(f));
        assert!(!a.is_empty());
        assert_eq!(a, read(&dir.path().join("b").join(f)), "{f} differs between runs");
    }
    let v: serde_json::Value = serde_json::from_slice(&read(&dir.path().join("a/results.json"))).unwrap();
    assert_eq!(v["schema"], "exdist.results/1");
    assert_eq!(v["status"], "ok");
    assert!(dir.path().join("a/run.meta.json").is_file());
    let leftovers: Vec<_> = std::fs::read_dir(dir.path().join("a")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(leftovers.len(), 4, "{leftovers:?}");
}

#[test]
fn bad_config_exits_2_with_a_position() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("bad.json"),
        "{\n  \"name\": \"x\",\n  \"kind\": \"modulus\",\n  \"params\": {\"study\": \"solve\",\n    \"scene\": {\"shape\": \"rectangle\", \"lenght\": 2, \"width\": 1, \"cells\": 8}}\n}\n",
    )
    .unwrap();
    let o = exdist(&["run", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 5"), "{err}");
    assert!(err.contains("lenght"), "{err}");
    assert!(!dir.path().join("runs").exists());
}

#[test]
fn semantic_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = exdist(&["run", "eggyolk-random", "--tol", "2"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = exdist(&["run", "no-such-entry"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn infeasible_run_exits_0() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("closed.json"),
        r#"{
  "name": "closed",
  "kind": "modulus",
  "params": {"study": "solve", "scene": {"shape": "split", "length": 2, "width": 1, "cells": 16}}
}"#,
    )
    .unwrap();
    let o = exdist(&["run", "closed.json", "--out", "o"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&read(&dir.path().join("o/results.json"))).unwrap();
    assert_eq!(v["status"], "infeasible");
    assert_eq!(v["summary"]["value"], 0.0);
    assert_eq!(v["summary"]["infeasible"], true);
}
