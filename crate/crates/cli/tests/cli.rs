mod common;

use common::{code, fixture, residue_args, stokes};
use serde_json::Value;
use std::path::Path;

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn args<'a>(head: &[&'a str], rest: &'a [String]) -> Vec<&'a str> {
    head.iter().copied().chain(rest.iter().map(String::as_str)).collect()
}

fn edit_json(src: &Path, dst: &Path, f: impl FnOnce(&mut Value)) {
    let mut v: Value = serde_json::from_str(&std::fs::read_to_string(src).unwrap()).unwrap();
    f(&mut v);
    std::fs::write(dst, v.to_string()).unwrap();
}

#[test]
fn stokes_writes_both_graphs_and_the_plot() {
    let dir = tempfile::tempdir().unwrap();
    let res = residue_args(common::TRIPLE);
    let o = stokes(&args(&["stokes", "--plot", "--out", p(dir.path())], &res));
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let g: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("stokes.json")).unwrap()).unwrap();
    assert_eq!(g["rays"].as_array().unwrap().len(), 6);
    assert_eq!(g["regions"].as_array().unwrap().len(), 3);
    let s: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("spectral.json")).unwrap()).unwrap();
    assert_eq!(s["spectral_rays"].as_array().unwrap().len(), 12);
    assert!(std::fs::read_to_string(dir.path().join("stokes.svg")).unwrap().contains("<circle"));
    let v = stokes(&["validate", p(&dir.path().join("spectral.json"))]);
    assert_eq!(code(&v), 0);
}

#[test]
fn double_zero_is_not_generic() {
    let o = stokes(&["stokes", "--residues", "4,0", "--residues", "1,0", "--residues", "1,0"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn negative_real_residue_is_not_generic() {
    let o = stokes(&["stokes", "--residues", "-1,0", "--residues", "1,0.2", "--residues", "0.5,0.1"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn saddle_triple_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let res = residue_args(common::saddle_triple());
    let o = stokes(&args(&["stokes", "--out", p(dir.path())], &res));
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn random_system_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    let graph = fixture("spectral_0_4.json");
    for out in [&a, &b] {
        let o = stokes(&["random-system", "--graph", p(&graph), "--seed", "42", "--out", p(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c = dir.path().join("c.json");
    stokes(&["random-system", "--graph", p(&graph), "--seed", "43", "--out", p(&c)]);
    assert_ne!(std::fs::read(&a).unwrap(), std::fs::read(&c).unwrap());
    assert_eq!(code(&stokes(&["validate", p(&a)])), 0);
}

#[test]
fn pipeline_runs_end_to_end() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    std::fs::copy(fixture("spectral_0_3.json"), d("g.json")).unwrap();
    assert_eq!(code(&stokes(&["random-system", "--graph", p(&d("g.json")), "--out", p(&d("sys.json"))])), 0);
    assert_eq!(code(&stokes(&["nonab", "--system", p(&d("sys.json")), "--out", p(&d("rep.json"))])), 0);
    assert_eq!(code(&stokes(&["validate", p(&d("rep.json"))])), 0);
    let o = stokes(&["ab", "--rep", p(&d("rep.json")), "--graph", p(&d("g.json")), "--out", p(&d("back.json"))]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&stokes(&["validate", p(&d("back.json"))])), 0);
    assert_eq!(code(&stokes(&["roundtrip", "--system", p(&d("back.json"))])), 0);
}

#[test]
fn malformed_graph_is_a_schema_error() {
    let o = stokes(&["validate", p(&fixture("stokes_degree2.json"))]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("branch_vertices[1]"));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ \"schema\": \"stokes-graph/1\", \"rays\": [").unwrap();
    assert_eq!(code(&stokes(&["validate", p(&bad)])), 1);
}

#[test]
fn zero_transport_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::copy(fixture("spectral_0_3.json"), dir.path().join("spectral_0_3.json")).unwrap();
    let sys = dir.path().join("sys.json");
    edit_json(&fixture("system_broken_0_3.json"), &sys, |v| {
        v["t"][0]["re"] = 0.0.into();
        v["t"][0]["im"] = 0.0.into();
    });
    assert_eq!(code(&stokes(&["validate", p(&sys)])), 1);
    assert_eq!(code(&stokes(&["nonab", "--system", p(&sys), "--out", p(&dir.path().join("r.json"))])), 1);
}

#[test]
fn broken_system_has_nontrivial_branch_monodromy() {
    let dir = tempfile::tempdir().unwrap();
    let sys = fixture("system_broken_0_3.json");
    let o = stokes(&["nonab", "--system", p(&sys), "--out", p(&dir.path().join("r.json"))]);
    assert_eq!(code(&o), 6);
    assert_eq!(code(&stokes(&["roundtrip", "--system", p(&sys)])), 6);
    assert_eq!(code(&stokes(&["validate", p(&sys)])), 5);
}

#[test]
fn diagonal_representation_is_not_transverse() {
    let dir = tempfile::tempdir().unwrap();
    let o = stokes(&[
        "ab",
        "--rep",
        p(&fixture("rep_diagonal_0_3.json")),
        "--graph",
        p(&fixture("spectral_0_3.json")),
        "--out",
        p(&dir.path().join("x.json")),
    ]);
    assert_eq!(code(&o), 7);
}

#[test]
fn resonant_exponent_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n);
    std::fs::copy(fixture("spectral_0_3.json"), d("g.json")).unwrap();
    stokes(&["random-system", "--graph", p(&d("g.json")), "--out", p(&d("sys.json"))]);
    stokes(&["nonab", "--system", p(&d("sys.json")), "--out", p(&d("rep.json"))]);
    edit_json(&d("rep.json"), &d("res.json"), |v| v["generators"][0]["lambda"] = serde_json::json!([0.5, 0.0]));
    let o = stokes(&["ab", "--rep", p(&d("res.json")), "--graph", p(&d("g.json")), "--out", p(&d("x.json"))]);
    assert_eq!(code(&o), 8);
}

#[test]
fn config_supplies_defaults_and_must_match_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{ "command": "stokes", "residues": [[0.6, 0.2], [0.9, -0.3], [0.5, 0.4]], "out": "traced" }"#).unwrap();
    let o = stokes(&["stokes", "--config", p(&cfg)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(dir.path().join("traced/stokes.json").exists());
    assert_eq!(code(&stokes(&["roundtrip", "--config", p(&cfg)])), 1);
    std::fs::write(&cfg, r#"{ "resideus": [] }"#).unwrap();
    assert_eq!(code(&stokes(&["stokes", "--config", p(&cfg)])), 1);
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(code(&stokes(&["frobnicate"])), 1);
    assert_eq!(code(&stokes(&["stokes", "--residues", "1,0"])), 1);
    assert_eq!(code(&stokes(&["stokes", "--residues", "x"])), 1);
    assert_eq!(code(&stokes(&["--help"])), 0);
    assert_eq!(code(&stokes(&["nonab", "--system", "/nonexistent/sys.json", "--out", "/tmp/x.json"])), 1);
}

#[test]
fn tiny_tolerance_fails_the_round_trip() {
    let res = residue_args(common::TRIPLE);
    let o = stokes(&args(&["roundtrip", "--tol", "1e-300"], &res));
    assert_eq!(code(&o), 4);
}
