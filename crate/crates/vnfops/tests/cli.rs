// SPDX-License-Identifier: Apache-2.0

//! End-to-end runs of the compiled binary against the checked-in fixtures.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vnfops"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_s(args: &[&str]) -> (i32, String, String) {
    let out = run(args);
    (
        out.status.code().expect("exit code"),
        String::from_utf8(out.stdout).expect("utf8 stdout"),
        String::from_utf8(out.stderr).expect("utf8 stderr"),
    )
}

fn arg(p: &Path) -> String {
    p.to_str().expect("utf8 path").to_string()
}

#[test]
fn no_arguments_is_a_usage_error() {
    let (code, _, err) = run_s(&[]);
    assert_eq!(code, 2);
    assert!(err.contains("Usage"), "stderr: {err}");
}

#[test]
fn verify_passing_fixture_exits_zero_with_all_verdicts() {
    let (code, out, _) = run_s(&["verify", &arg(&fixture("vcpe.json")), &arg(&fixture("policies.json"))]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("HOLDS").count(), 6, "stdout: {out}");
    assert!(out.contains("6/6 hold"), "stdout: {out}");
    assert!(out.contains("witness"), "stdout: {out}");
}

#[test]
fn verify_denying_firewall_exits_one() {
    let (code, out, err) = run_s(&[
        "verify",
        &arg(&fixture("vcpe_deny.json")),
        &arg(&fixture("policies.json")),
    ]);
    assert_eq!(code, 1);
    assert_eq!(out.matches("FAILS").count(), 3, "stdout: {out}");
    assert!(err.contains("do not hold"), "stderr: {err}");
}

#[test]
fn verify_json_format_is_machine_readable() {
    let (code, out, _) = run_s(&[
        "verify",
        &arg(&fixture("vcpe.json")),
        &arg(&fixture("policies.json")),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(v["items"].as_array().expect("items").len(), 6);
}

#[test]
fn verify_out_dir_receives_report_and_timings() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run_s(&[
        "verify",
        &arg(&fixture("vcpe.json")),
        &arg(&fixture("policies.json")),
        "--out",
        &arg(dir.path()),
    ]);
    assert_eq!(code, 0);
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"holds\": true"));
    let timings = std::fs::read_to_string(dir.path().join("timings.csv")).unwrap();
    assert!(timings.starts_with("policy_id,kind,holds,elapsed_ms"), "{timings}");
}

#[test]
fn extract_lists_the_three_stock_chains() {
    let (code, out, _) = run_s(&["extract", &arg(&fixture("vcpe.json"))]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines.iter().all(|l| l.contains(" -> ")), "stdout: {out}");
    assert!(out.contains("srv_web") && out.contains("srv_email") && out.contains("srv_other"));
}

#[test]
fn run_writes_reports_and_is_seed_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let flat = arg(&fixture("flat.toml"));
    for dir in [&a, &b] {
        let (code, out, _) = run_s(&["run", &flat, "--out", &arg(dir.path())]);
        assert_eq!(code, 0);
        assert!(out.contains("raw_samples 240000"), "stdout: {out}");
    }
    let (code, _, _) = run_s(&["run", &flat, "--out", &arg(c.path()), "--seed", "99"]);
    assert_eq!(code, 0);

    let mut some_noise_differs = false;
    for name in ["timeseries.csv", "links.csv", "ledger.csv", "timeseries.dat", "snapshot.json"] {
        let fa = std::fs::read(a.path().join(name)).expect(name);
        let fb = std::fs::read(b.path().join(name)).expect(name);
        assert_eq!(fa, fb, "{name} differs between identical runs");
        if std::fs::read(c.path().join(name)).expect(name) != fa {
            some_noise_differs = true;
        }
    }
    assert!(some_noise_differs, "reseeding changed no report at all");
}

#[test]
fn troubleshoot_names_the_load_balancer_on_the_skewed_snapshot() {
    let (code, out, _) = run_s(&[
        "troubleshoot",
        &arg(&fixture("elastic_fw.tsg")),
        "--snapshot",
        &arg(&fixture("skewed_snapshot.json")),
    ]);
    assert_eq!(code, 0);
    assert!(out.contains("verdict: debug LoadBalancer"), "stdout: {out}");
    assert!(out.contains("[overload] traffic_gen"), "stdout: {out}");
}

#[test]
fn troubleshoot_json_format_round_trips() {
    let (code, out, _) = run_s(&[
        "troubleshoot",
        &arg(&fixture("elastic_fw.tsg")),
        "--snapshot",
        &arg(&fixture("skewed_snapshot.json")),
        "--format",
        "json",
    ]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).expect("valid json");
    assert_eq!(v["verdict"], "debug LoadBalancer");
}

#[test]
fn opex_bands_match_the_model() {
    let (code, out, _) = run_s(&["opex"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.800") && out.contains("0.664"), "stdout: {out}");
    let (code, out, _) = run_s(&["opex", "--scenario", "conservative"]);
    assert_eq!(code, 0);
    assert!(out.contains("0.300"), "stdout: {out}");
}

#[test]
fn oracle_agrees_on_the_port_agnostic_policy_set() {
    let (code, out, _) = run_s(&[
        "oracle",
        &arg(&fixture("vcpe.json")),
        &arg(&fixture("oracle_policies.json")),
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.matches("AGREE").count(), 6, "stdout: {out}");
    assert!(!out.contains("MISMATCH"), "stdout: {out}");
}

#[test]
fn oracle_flags_policies_outside_its_reduced_domain() {
    // Port-pinned policies are invisible to the enumerated domain, so the
    // cross-check must disagree loudly rather than pass vacuously.
    let (code, out, _) = run_s(&[
        "oracle",
        &arg(&fixture("vcpe.json")),
        &arg(&fixture("policies.json")),
    ]);
    assert_eq!(code, 1);
    assert_eq!(out.matches("MISMATCH").count(), 3, "stdout: {out}");
}

#[test]
fn missing_and_malformed_inputs_exit_three() {
    let (code, _, err) = run_s(&["verify", "/no/such/file.json", &arg(&fixture("policies.json"))]);
    assert_eq!(code, 3);
    assert!(err.contains("error:"), "stderr: {err}");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "duration_s = \"sixty\"").unwrap();
    let (code, _, _) = run_s(&["run", &arg(&bad)]);
    assert_eq!(code, 3);

    let not_json = dir.path().join("graph.json");
    std::fs::write(&not_json, "{").unwrap();
    let (code, _, _) = run_s(&["extract", &arg(&not_json)]);
    assert_eq!(code, 3);
}

#[test]
fn rejected_deployment_exits_one_with_the_failing_policies() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("deny.toml");
    let toml = std::fs::read_to_string(fixture("flat.toml")).unwrap();
    let patched = toml
        .replace("builtin:vcpe-elastic", &arg(&fixture("vcpe_deny.json")))
        .replace("initial_firewalls = 20", "initial_firewalls = 1");
    std::fs::write(&cfg, patched).unwrap();
    let (code, _, err) = run_s(&["run", &arg(&cfg), "--out", &arg(dir.path())]);
    assert_eq!(code, 1);
    assert!(err.contains("FAILS"), "stderr: {err}");
    assert!(err.contains("3 of 6"), "stderr: {err}");
}
