//! End-to-end checks of the `qqb` binary: exit codes, file outputs, and
//! run-to-run determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn qqb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qqb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("qqb-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn no_arguments_is_a_usage_error() {
    let out = qqb(&[]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("Usage"), "stderr was: {stderr}");
}

#[test]
fn version_prints_and_succeeds() {
    let out = qqb(&["version"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("qqb"));
    assert!(stdout.contains("nickel_B"));
}

#[test]
fn unknown_preset_is_a_usage_error() {
    let out = qqb(&["simulate", "--preset", "fig99"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown preset"));
}

#[test]
fn bad_format_is_a_usage_error() {
    let out = qqb(&["simulate", "--preset", "fig2", "--format", "xml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn simulate_fig2_writes_csv_with_four_branches() {
    let path = tmp("fig2.csv");
    let out = qqb(&[
        "simulate",
        "--preset",
        "fig2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "sweep_param,sweep_value,t,W,P,K,C_l1,negativity,W_passive"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 4 * 2000);
    let branches: std::collections::BTreeSet<&str> =
        rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    assert_eq!(branches.len(), 4);
    std::fs::remove_file(&path).ok();
}

#[test]
fn preset_runs_are_byte_identical() {
    let a = tmp("det-a.csv");
    let b = tmp("det-b.csv");
    for path in [&a, &b] {
        let out = qqb(&[
            "simulate",
            "--preset",
            "fig3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes_a = std::fs::read(&a).unwrap();
    let bytes_b = std::fs::read(&b).unwrap();
    assert_eq!(bytes_a, bytes_b);
    std::fs::remove_file(&a).ok();
    std::fs::remove_file(&b).ok();
}

#[test]
fn sweep_requires_a_sweep_axis() {
    let out = qqb(&["sweep"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sweep"));

    let out = qqb(&["sweep", "--preset", "fig1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn preset_subcommand_round_trips_through_config() {
    let cfg = tmp("fig3.conf");
    let out = qqb(&["preset", "fig3", "--out", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&cfg).unwrap();
    assert!(text.contains("sweep_param = temperature"));
    assert!(text.contains("sweep_values = 1,2,3,4"));

    // Feed the printed config back through simulate.
    let data = tmp("fig3-from-config.json");
    let out = qqb(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "json",
        "--out",
        data.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&data).unwrap()).unwrap();
    assert_eq!(value["metadata"]["sweep_param"], "temperature");
    assert_eq!(value["rows"].as_array().unwrap().len(), 4 * 2000);
    std::fs::remove_file(&cfg).ok();
    std::fs::remove_file(&data).ok();
}

#[test]
fn flag_overrides_reach_the_metadata() {
    let path = tmp("override.json");
    let out = qqb(&[
        "simulate",
        "--preset",
        "fig1",
        "--mode",
        "total",
        "--coherence-basis",
        "eigen",
        "--format",
        "json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["metadata"]["mode"], "total");
    assert_eq!(value["metadata"]["coherence_basis"], "eigen");
    let notes = value["metadata"]["notes"].as_array().unwrap();
    assert!(notes
        .iter()
        .any(|n| n.as_str().unwrap().contains("diagnostic")));
    std::fs::remove_file(&path).ok();
}

#[test]
fn audit_writes_a_passing_report() {
    let path = tmp("report.json");
    let out = qqb(&[
        "audit",
        "--grid",
        "random:50",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let value: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(value["passes"], true);
    assert_eq!(value["seed"], 7);
    assert_eq!(value["points"], 50);
    assert!(value["thermal_state"]["violations"]
        .as_array()
        .unwrap()
        .is_empty());
    // The report records the adjudicated branch mapping and both phase laws.
    assert_eq!(value["branch_adjudication"][0]["entry"], "rho22");
    assert!(
        value["evolved_phase"]["max_abs_entry_difference"]
            .as_f64()
            .unwrap()
            > 1e-3
    );
    std::fs::remove_file(&path).ok();
}

#[test]
fn audit_grid_spec_is_validated() {
    let out = qqb(&["audit", "--grid", "dense:10"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn io_failure_maps_to_exit_3() {
    let out = qqb(&[
        "simulate",
        "--preset",
        "fig2",
        "--out",
        "/nonexistent-dir/qqb.csv",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn total_mode_with_closed_form_backend_is_rejected() {
    let out = qqb(&[
        "simulate",
        "--preset",
        "fig1",
        "--mode",
        "total",
        "--backend",
        "closed-form",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
