use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gtheta(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gtheta")).args(args).current_dir(dir).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn step_space_theta_refutation_exits_one_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(&["verify", "--space", "step_space", "--axioms", "theta"], dir.path());
    assert_eq!(code(&o), 1);
    let doc = stdout_json(&o);
    let w = &doc["result"]["reports"][0]["witness"];
    assert_eq!(w["lhs"], 100.0);
    assert_eq!(w["rhs"], 50.0);
    assert_eq!(w["points"][0], "(1, 0)");
    assert_eq!(doc["header"]["command"], "verify");
}

#[test]
fn passing_verification_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(&["verify", "--space", "finite_plane_space", "--trials", "500"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn output_is_deterministic_apart_from_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let run = || stdout_json(&gtheta(&["--seed", "11", "verify", "--space", "int_b_space", "--trials", "2000"], dir.path()));
    let (a, b) = (run(), run());
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["header"]["seed"], 11);
}

#[test]
fn empty_config_is_a_configuration_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), "{}").unwrap();
    let o = gtheta(&["--config", "empty.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("command"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"command": "verify", "args": {"space": {"space": "seq_b_space", "variant": "K83", "depth": "deep"}}}"#;
    std::fs::write(dir.path().join("bad.json"), cfg).unwrap();
    let o = gtheta(&["--config", "bad.json"], dir.path());
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("args.space") && err.contains("depth"), "{err}");

    std::fs::write(dir.path().join("typo.json"), r#"{"command": "repro all", "args": {"trails": 5}}"#).unwrap();
    let o = gtheta(&["--config", "typo.json"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("trails"));
}

#[test]
fn config_file_runs_like_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"command": "topology ball", "args": {"space": {"space": "seq_b_space", "variant": "K83", "depth": 10000},
                  "center": "1", "radius": 2, "t": 1}}"#;
    std::fs::write(dir.path().join("ball.json"), cfg).unwrap();
    let from_cfg = stdout_json(&gtheta(&["--config", "ball.json"], dir.path()));
    let from_flags = stdout_json(&gtheta(
        &["topology", "ball", "--space", "seq_b_space:variant=K83,depth=10000", "--center", "1", "--radius", "2"],
        dir.path(),
    ));
    assert_eq!(from_cfg["result"], from_flags["result"]);
    assert_eq!(from_cfg["result"]["members"], serde_json::json!(["0", "1"]));
}

#[test]
fn unknown_space_and_missing_argument_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&gtheta(&["verify", "--space", "nowhere"], dir.path())), 2);
    assert_eq!(code(&gtheta(&["verify"], dir.path())), 2);
    assert_eq!(code(&gtheta(&["topology", "ball", "--space", "step_space"], dir.path())), 2);
}

#[test]
fn open_check_refutes_the_k83_ball() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(
        &["topology", "open-check", "--space", "seq_b_space:variant=K83", "--center", "1", "--radius", "2", "--t", "1"],
        dir.path(),
    );
    assert_eq!(code(&o), 1);
    let doc = stdout_json(&o);
    assert_eq!(doc["result"]["check"]["witness"]["center"], "0");
}

#[test]
fn seq_check_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(
        &[
            "seq", "check", "--space", "seq_b_space:variant=K83", "--sequence", "reciprocal_even", "--limit", "0",
            "--eps", "1e-3", "--horizon", "100000", "--t-grid", "0.5,1,2", "--out", "trace.csv",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert!(csv.starts_with("index,t,distance\n0,0.5,1\n"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("trace.json")).unwrap()).unwrap();
    assert_eq!(report["result"]["convergence"]["verdict"], "pass");
}

#[test]
fn fixed_point_run_reaches_three_three() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(
        &[
            "fixed-point", "run", "--space", "finite_plane_space", "--map", "plane_T", "--start", "(7,9)", "--u", "0.875",
            "--variant", "general", "--tol", "1e-10", "--out", "fp.json",
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("fp.json")).unwrap()).unwrap();
    assert_eq!(doc["result"]["result"]["fixed_point"], "(3, 3)");
    assert_eq!(doc["result"]["result"]["iterations"], 2);
    assert!(std::fs::read_to_string(dir.path().join("fp.csv")).unwrap().starts_with("iteration,t,distance\n"));
}

#[test]
fn fde_solve_writes_solution_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(
        &["fde", "solve", "--eta", "1.5", "--g", "linear:lambda=0.2,c=tau", "--n", "2000", "--tol", "1e-10", "--out", "solution.csv"],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "t,f");
    assert_eq!(lines[1], "0,0");
    assert_eq!(lines.len(), 2002);
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("solution.json")).unwrap()).unwrap();
    assert_eq!(doc["result"]["solution"]["converged"], true);
}

#[test]
fn fde_gate_rejection_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(&["fde", "solve", "--g", "linear:lambda=0.5,c=tau", "--n", "200"], dir.path());
    assert_eq!(code(&o), 1);
    assert_eq!(stdout_json(&o)["result"]["rejected"], true);
}

#[test]
fn csv_format_needs_a_csv_artifact() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&gtheta(&["--format", "csv", "spaces", "list"], dir.path())), 2);
    let o = gtheta(&["spaces", "list"], dir.path());
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["result"]["spaces"].as_array().unwrap().len(), 8);
}

#[test]
fn repro_all_exits_zero_without_failures() {
    let dir = tempfile::tempdir().unwrap();
    let o = gtheta(&["repro", "all", "--trials", "500"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let doc = stdout_json(&o);
    assert_eq!(doc["result"]["failed"], 0);
    assert_eq!(doc["result"]["entries"].as_array().unwrap().len(), 27);
}
