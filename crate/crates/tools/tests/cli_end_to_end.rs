//! Runs the `vertebra` binary for every subcommand against the shipped
//! default configuration.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn config() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vertebra"))
        .arg("--config")
        .arg(config())
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn f(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn shipped_config_is_the_builtin_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_vertebra")).arg("default-config").output().unwrap();
    assert!(out.status.success());
    let shipped = std::fs::read_to_string(config()).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), shipped);
}

#[test]
fn fk_lists_four_branches() {
    let v = ok_json(&["--radians", "fk", "--q", "0.1,0.2,pi/4", "--all"]);
    assert_eq!(v["count"], 4);
    let sols = v["solutions"].as_array().unwrap();
    let at_half_pi = sols.iter().filter(|s| (f(&s["pitch"]) - std::f64::consts::FRAC_PI_2).abs() < 1e-8).count();
    assert_eq!(at_half_pi, 2);
    // degrees by default
    let v = ok_json(&["fk", "--q", "0,0,45"]);
    let rpy: Vec<f64> = v["orientation"]["rpy"].as_array().unwrap().iter().map(f).collect();
    assert_eq!(rpy, vec![45.0, 0.0, 0.0]);
    let v = ok_json(&["fk", "--q", "5,-3,50", "--assembly", "-"]);
    assert!(v["orientation"]["matrix"].is_array());
}

#[test]
fn ik_lists_four_solutions_and_round_trips() {
    let v = ok_json(&["ik", "--rpy", "45,15,15", "--all"]);
    assert_eq!(v["count"], 4);
    let v = ok_json(&["ik", "--rpy", "45,15,15"]);
    assert_eq!(v["mode"], "++");
    let q: Vec<String> = v["joints"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
    let back = ok_json(&["fk", "--q", &q.join(",")]);
    let rpy: Vec<f64> = back["orientation"]["rpy"].as_array().unwrap().iter().map(f).collect();
    for (got, want) in rpy.iter().zip([45.0, 15.0, 15.0]) {
        assert!((got - want).abs() < 1e-6);
    }
}

#[test]
fn jac_reports_isotropy_and_velocity_map() {
    let v = ok_json(&["jac"]);
    assert_eq!(v["singularity"]["kind"], "regular");
    assert_eq!(v["isotropy"]["b_isotropic"], false);
    let v = ok_json(&["--variant", "parallel_axes", "jac", "--qdot", "1,1,0", "--omega", "1,0,0"]);
    assert_eq!(v["isotropy"]["a_isotropic"], true);
    assert!((f(&v["omega"][0]) - 2f64.sqrt()).abs() < 1e-8);
    assert!(f(&v["omega"][1]).abs() < 1e-8 && f(&v["omega"][2]).abs() < 1e-8);
    assert!((f(&v["isotropy"]["kappa_a"]) - 1.0).abs() < 1e-8);
}

#[test]
fn check_names_failed_constraints() {
    let v = ok_json(&["check"]);
    assert_eq!(v["feasible"], true);
    let v = ok_json(&["check", "--rpy", "45,0,25"]);
    assert_eq!(v["feasible"], false);
    assert!(!v["failed"].as_array().unwrap().is_empty());
    let v = ok_json(&["check", "--rpy", "45,160,0"]);
    assert_eq!(v["failed"], serde_json::json!(["unreachable"]));
    assert!(v["joints"].is_null());
}

#[test]
fn singular_scan_counts_samples() {
    let v = ok_json(&["singular-scan", "--step", "10", "--max-tilt", "40"]);
    // one sample at tilt 0, then 36 azimuths on each of 4 rings
    assert_eq!(v["samples"], 1 + 36 * 4);
    assert!(v["singular"].as_array().unwrap().is_empty());
}

#[test]
fn workspace_exports_all_formats() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let v = ok_json(&["workspace", "--out", d, "--format", "csv", "--jointspace"]);
    let ext = &v["torsion_extent"];
    assert!((f(&ext[0]) + 18.0).abs() <= 3.0 && (f(&ext[1]) - 18.0).abs() <= 3.0);
    let slices = v["slices"].as_u64().unwrap() as usize;
    let csv = std::fs::read_to_string(dir.path().join("workspace.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("torsion_deg,azimuth_deg,tilt_deg,x,y,z,t1_deg,t2_deg,t3_deg"));
    assert_eq!(lines.count(), slices * 72);
    let js = std::fs::read_to_string(dir.path().join("jointspace.csv")).unwrap();
    assert_eq!(js.lines().count(), slices * 72 + 1);

    ok_json(&["workspace", "--out", d, "--format", "json"]);
    let map: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("workspace.json")).unwrap()).unwrap();
    assert_eq!(map["format"], 1);
    assert_eq!(map["upper"].as_array().unwrap().len() + map["lower"].as_array().unwrap().len(), slices);

    ok_json(&["workspace", "--out", d, "--format", "obj"]);
    let obj = std::fs::read_to_string(dir.path().join("workspace.obj")).unwrap();
    assert_eq!(obj.lines().filter(|l| l.starts_with("v ")).count(), slices * 72);
    assert_eq!(obj.lines().filter(|l| l.starts_with("f ")).count(), (slices - 1) * 72 * 2);
}

#[test]
fn outputs_are_byte_identical_across_runs_and_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let ra = run(&["--threads", "1", "workspace", "--out", a.path().to_str().unwrap(), "--format", "json"]);
    let rb = run(&["--threads", "4", "workspace", "--out", b.path().to_str().unwrap(), "--format", "json"]);
    assert!(ra.status.success() && rb.status.success());
    assert_eq!(ra.stdout, rb.stdout);
    let fa = std::fs::read(a.path().join("workspace.json")).unwrap();
    let fb = std::fs::read(b.path().join("workspace.json")).unwrap();
    assert_eq!(fa, fb);
    assert_eq!(run(&["targets"]).stdout, run(&["targets"]).stdout);
}

#[test]
fn jointspace_to_stdout_and_file() {
    let out = run(&["jointspace"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("t1_deg,t2_deg,t3_deg"));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("cloud.csv");
    let v = ok_json(&["jointspace", "--offset", "1", "--out", p.to_str().unwrap()]);
    assert_eq!(v["points"].as_u64().unwrap() as usize + 1, text.lines().count());
    assert!(p.exists());
}

#[test]
fn targets_report_fraction_and_violations() {
    let v = ok_json(&["targets", "--yaw", "0", "--pitch", "0", "--roll", "0"]);
    assert_eq!(v["samples"], 1);
    assert_eq!(v["all_feasible"], true);
    let v = ok_json(&["targets", "--yaw", "90", "--pitch", "90", "--roll", "90", "--grid", "5"]);
    assert_eq!(v["samples"], 125);
    assert!(f(&v["fraction"]) < 1.0);
    let names: Vec<&str> = v["violations"].as_array().unwrap().iter().map(|x| x["constraint"].as_str().unwrap()).collect();
    assert!(!names.is_empty());
    assert!(v["worst"]["report"]["failed"].is_array());
}

#[test]
fn calibrate_reproduces_the_shipped_cones() {
    let v = ok_json(&["calibrate", "--coarse"]);
    assert_eq!(v["lima_b"], 29.0);
    assert_eq!(v["lima_c"], 47.0);
    let shipped: Value = serde_json::from_str(&std::fs::read_to_string(config()).unwrap()).unwrap();
    assert!((f(&v["constraints"]["limd"]) - f(&shipped["constraints"]["limd"])).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["bogus"]).status.code(), Some(1));
    assert_eq!(run(&["fk", "--q", "1,2"]).status.code(), Some(1));
    assert_eq!(run(&["ik", "--rpy", "45,0,0", "--mode", "x"]).status.code(), Some(1));
    assert_eq!(run(&["ik", "--rpy", "200,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["--variant", "parallel_axes", "fk", "--q", "0,0,0", "--all"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"format": 2}"#).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_vertebra")).args(["--config", bad.to_str().unwrap(), "check"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let missing = Command::new(env!("CARGO_BIN_EXE_vertebra")).args(["--config", "/nonexistent.json", "check"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}
