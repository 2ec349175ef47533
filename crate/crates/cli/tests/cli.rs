use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "core", "fixtures", &format!("{name}.json")].iter().collect();
    p.display().to_string()
}

fn tmesh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tmesh")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> serde_json::Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = tmesh(&all);
    assert!(out.status.code().is_some(), "terminated by signal");
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("bad json ({e}): {}", String::from_utf8_lossy(&out.stdout)))
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tmesh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn stats_of_corrected_figure_two() {
    let v = json(&["stats", &fixture("fig2_corrected")]);
    let s = &v["values"]["stats"];
    assert_eq!((s["v_plus"].as_u64(), s["e"].as_u64(), s["f"].as_u64()), (Some(6), Some(6), Some(13)));
    assert_eq!(v["checks"][0]["pass"], true);
}

#[test]
fn stats_of_literal_figure_two() {
    let v = json(&["stats", &fixture("fig2")]);
    let s = &v["values"]["stats"];
    assert_eq!((s["v_plus"].as_u64(), s["e"].as_u64(), s["f"].as_u64()), (Some(5), Some(6), Some(12)));
}

#[test]
fn single_cell_has_no_interior() {
    let dir = tempdir();
    let path = dir.join("cell.json");
    std::fs::write(&path, r#"{"cells": [{"x0": 0, "x1": 1, "y0": 0, "y1": 1}]}"#).unwrap();
    let v = json(&["stats", path.to_str().unwrap()]);
    let s = &v["values"]["stats"];
    assert_eq!((s["v_plus"].as_u64(), s["e"].as_u64(), s["v"].as_u64()), (Some(0), Some(0), Some(0)));
}

#[test]
fn malformed_json_is_a_usage_error() {
    let dir = tempdir();
    let path = dir.join("broken.json");
    std::fs::write(&path, "{\n \"cells\": [\n").unwrap();
    let out = tmesh(&["stats", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn verify_figure_six_biquadratic() {
    let out = tmesh(&["verify", &fixture("fig6"), "--suite", "biquadratic"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS biquadratic.hierarchical_formula: expected 1, got 1"), "{text}");
}

#[test]
fn verify_figure_two_bilinear() {
    let out = tmesh(&["verify", &fixture("fig2_corrected"), "--suite", "bilinear"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("PASS bilinear.hbc_dim_eq_vplus: expected 6, got 6"), "{text}");
}

#[test]
fn verify_random_mesh_all_suites() {
    let v = json(&["verify", "--random", "seed=7,levels=2,cvc", "--suite", "all"]);
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.len() > 20);
    assert!(checks.iter().all(|c| c["pass"] == true), "{checks:?}");
    let names: Vec<&str> = checks.iter().map(|c| c["name"].as_str().unwrap()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
}

#[test]
fn unknown_suite_is_rejected() {
    let out = tmesh(&["verify", &fixture("fig6"), "--suite", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

#[test]
fn oracle_command() {
    let v = json(&["oracle", &fixture("fig2_corrected"), "--space", "1,1,0,0", "--hbc"]);
    assert_eq!(v["values"]["dimension"], 6);
    let v = json(&["oracle", &fixture("fig6"), "--space", "2,2,1,1", "--hbc"]);
    assert_eq!(v["values"]["dimension"], 1);
}

#[test]
fn dim_command_agrees_with_oracle() {
    let out = tmesh(&["dim", &fixture("fig9")]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn basis_commands() {
    let v = json(&["basis", &fixture("fig6")]);
    assert_eq!(v["values"]["functions"], 5);
    let v = json(&["basis", &fixture("fig9"), "--kind", "hierarchical"]);
    assert_eq!(v["values"]["functions"], 27);
    let out = tmesh(&["basis", &fixture("fig2"), "--kind", "hierarchical"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cvr_of_figure_eleven() {
    let dir = tempdir();
    let svg = dir.join("fig11.svg");
    let v = json(&["cvr", &fixture("fig11_t1"), "--svg", svg.to_str().unwrap(), "--conjecture", "2,2"]);
    assert_eq!(v["values"]["components"], 2);
    assert_eq!(v["values"]["conjecture"]["verdict"], "Agree");
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.contains(r#"stroke="black""#));
    assert!(text.contains(r##"stroke="#b0b0b0""##));
}

#[test]
fn gen_is_deterministic_and_readable() {
    let a = tmesh(&["gen", "--seed", "3", "--levels", "2", "--cvc"]);
    let b = tmesh(&["gen", "--seed", "3", "--levels", "2", "--cvc"]);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempdir();
    let path = dir.join("gen.json");
    std::fs::write(&path, &a.stdout).unwrap();
    let v = json(&["verify", path.to_str().unwrap(), "--suite", "euler"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn extend_writes_a_mesh() {
    let dir = tempdir();
    let path = dir.join("ext.json");
    let v = json(&["extend", &fixture("fig6"), "--m", "1", "--n", "1", "--margin", "1/2", "-o", path.to_str().unwrap()]);
    assert!(v["values"]["stats"]["v_plus"].as_u64().unwrap() > 5);
    let s = json(&["stats", path.to_str().unwrap()]);
    assert_eq!(s["values"]["stats"], v["values"]["stats"]);
}

#[test]
fn render_matches_golden_file() {
    let dir = tempdir();
    let svg = dir.join("fig5.svg");
    let out = tmesh(&["render", &fixture("fig5"), "--svg", svg.to_str().unwrap(), "--levels"]);
    assert_eq!(out.status.code(), Some(0));
    let golden: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "golden", "fig5_levels.svg"].iter().collect();
    assert_eq!(std::fs::read_to_string(&svg).unwrap(), std::fs::read_to_string(golden).unwrap());
}

#[test]
fn plain_render_has_only_mesh_lines() {
    let dir = tempdir();
    let svg = dir.join("plain.svg");
    tmesh(&["render", &fixture("fig6"), "--svg", svg.to_str().unwrap()]);
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(!text.contains("<circle"));
    assert!(!text.contains("level 0"));
}

#[test]
fn missing_file_is_a_usage_error() {
    let out = tmesh(&["stats", "/nonexistent/mesh.json"]);
    assert_eq!(out.status.code(), Some(2));
}
