//! End-to-end checks of the `rlmc` binary: flag handling, config-file
//! overlay, structured validation errors and exit codes.

use std::process::Command;

fn rlmc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rlmc"))
}

#[test]
fn bias_sweep_roundtrip_with_flags() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bias.csv");
    let status = rlmc()
        .args(["bias-sweep", "--seed", "7", "--out"])
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let body = std::fs::read_to_string(&out).unwrap();
    assert!(body.starts_with("experiment,param1,value1,param2,value2,statistic,value,std_error,pass"));
    assert_eq!(body.lines().count(), 6);
    let summary = std::fs::read_to_string(dir.path().join("bias.summary.csv")).unwrap();
    assert!(summary.contains("bias_order_slope"));
}

#[test]
fn config_file_overlays_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    std::fs::write(
        &config,
        "# reduced sweep\nexperiment = bias-sweep\npotential.kind = quadratic\n\
         potential.diag = 2.0\ngrid.eta = 0.2, 0.1, 0.05\n",
    )
    .unwrap();
    let out = dir.path().join("sweep.csv");
    let status = rlmc()
        .arg("bias-sweep")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    let body = std::fs::read_to_string(&out).unwrap();
    assert_eq!(body.lines().count(), 4, "3 grid points expected:\n{body}");
}

#[test]
fn invalid_config_names_the_violated_clause() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.cfg");
    // omega = 1/(2c) = 1 fails the omega < m/2 hypothesis for m = 1.
    std::fs::write(
        &config,
        "schedule.kind = polynomial\nschedule.c = 0.5\nschedule.alpha = 1.0\n",
    )
    .unwrap();
    let output = rlmc()
        .arg("moment-check")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("m.csv"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("omega"), "stderr was: {stderr}");
    assert!(stderr.contains("m/2"), "stderr was: {stderr}");
}

#[test]
fn unknown_config_key_is_rejected_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("typo.cfg");
    std::fs::write(&config, "grid.etas = 0.1\n").unwrap();
    let output = rlmc()
        .arg("bias-sweep")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("b.csv"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("unknown config key 'grid.etas'"), "stderr was: {stderr}");
    assert!(stderr.contains("typo.cfg:1"), "stderr was: {stderr}");
}

#[test]
fn drift_step_outside_lemma_range_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("drift.cfg");
    std::fs::write(&config, "grid.eta = 1.5\nn_mc = 10\n").unwrap();
    let output = rlmc()
        .arg("drift-check")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("d.csv"))
        .output()
        .unwrap();
    assert!(!output.status.success());
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("m/L^2"), "stderr was: {stderr}");
}

#[test]
fn moment_check_writes_optional_trajectory_dump() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("m.cfg");
    let traj = dir.path().join("traj.csv");
    std::fs::write(
        &config,
        format!("replicas = 16\nn_steps = 8\ncheckpoints = 4, 8\ntraj = {}\n", traj.display()),
    )
    .unwrap();
    let status = rlmc()
        .arg("moment-check")
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(dir.path().join("m.csv"))
        .status()
        .unwrap();
    assert!(status.success());
    let body = std::fs::read_to_string(&traj).unwrap();
    assert!(body.starts_with("k,t_k,gamma_k,x_1"));
    assert_eq!(body.lines().count(), 10); // header + 9 states
}
