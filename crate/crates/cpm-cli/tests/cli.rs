use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn cpm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpm")).args(args).output().expect("binary runs")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn build_reports_faces() {
    let o = cpm(&["build", "--genus", "1", "--weights", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["faces"], 6);
    assert_eq!(v["genus"], 1);
    let o = cpm(&["build", "--wheel", "1", "1"]);
    assert_eq!(json(&o)["spokes"], 2);
    let o = cpm(&["build", "--genus", "0", "--weights", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = cpm(&["build", "--genus", "0", "--weights", "1,x"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_writes_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cpm(&["--out", out, "build", "--genus", "0", "--weights", "1,2,3", "--dot"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("graph.json").exists());
    assert!(std::fs::read_to_string(dir.path().join("graph.dot")).unwrap().contains("graph"));
}

#[test]
fn quiverize_fixture() {
    let o = cpm(&["quiverize", fixture("botplustop.json").to_str().unwrap()]);
    assert_eq!(json(&o)["pattern"], "←←→→");
    let o = cpm(&["quiverize", fixture("wheel11.json").to_str().unwrap()]);
    assert_eq!(json(&o)["shape"], "cycle");
    let o = cpm(&["quiverize", "/nonexistent.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reduce_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = cpm(&["--out", out, "--emit-dot-per-step", "reduce", "--genus", "1", "--weights", "1,2,3", "--track-random", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["weights"], serde_json::json!([1, 1, 1, 1, 1, 1]));
    assert!(dir.path().join("step_2.dot").exists());
    let trace = dir.path().join("trace.json");
    let o = cpm(&["verify", trace.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tampered_trace_exits_3() {
    let o = cpm(&["verify", fixture("tampered_trace.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("step 0"));
    let o = cpm(&["verify", fixture("trace_g0.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn hms_and_euler() {
    let o = cpm(&["hms-check", "--genus", "1", "--weights", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["gluing_ok"], true);
    let o = cpm(&["--field", "Q", "euler", "--genus", "0", "--weights", "1,2", "--count", "2"]);
    assert_eq!(json(&o)["euler"].as_array().unwrap().len(), 2);
    let o = cpm(&["--field", "12", "euler", "--wheel", "1", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn outputs_are_deterministic() {
    let run = || cpm(&["--seed", "9", "stalks", "--genus", "0", "--weights", "2,2"]).stdout;
    assert_eq!(run(), run());
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        cpm(&["--out", d.path().to_str().unwrap(), "reduce", "--genus", "0", "--weights", "1,2,3", "--track-random", "2"]);
    }
    let ta = std::fs::read(a.path().join("trace.json")).unwrap();
    assert_eq!(ta, std::fs::read(b.path().join("trace.json")).unwrap());
}
