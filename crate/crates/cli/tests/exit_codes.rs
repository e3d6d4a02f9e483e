use std::fs;
use std::process::Command;

fn auvplan(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_auvplan")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn missing_config_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let (code, err) = auvplan(&["plan-route", "--config", "/nonexistent/x.toml", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("x.toml"), "{err}");
}

#[test]
fn invalid_values_are_config_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.toml");
    for body in ["repetitions = 0", "scenario = 9", "[ga]\nmutation_probability = 2.0", "unknown_key = 1"] {
        fs::write(&cfg, body).unwrap();
        let (code, _) = auvplan(&["monte-carlo", "--config", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
        assert_eq!(code, 2, "{body}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    assert_eq!(auvplan(&["plan-path", "--bogus"]).0, 2);
}

#[test]
fn impossible_budget_is_a_mission_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("tight.toml");
    fs::write(&cfg, "route_budget = 10.0\nmission_budget = 10.0\n[network]\nn_waypoints = 8\nn_edges = 12\n[ga]\npopulation_size = 10\nmax_iterations = 5\n").unwrap();
    let out = tmp.path().join("o");
    let (route, _) = auvplan(&["plan-route", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(route, 1);
    let (mission, _) = auvplan(&["run-mission", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(mission, 1);
    let outcome = fs::read_to_string(out.join("mission_outcome.csv")).unwrap();
    assert!(outcome.contains("no route"), "{outcome}");
}

#[test]
fn unwritable_output_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let (code, err) = auvplan(&["gen-network", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(err.contains("file"), "{err}");
}
