// SPDX-License-Identifier: Apache-2.0

//! A deployment whose policies do not hold must be rejected before the
//! first tick, with the verification report attached.

use nffg_core::fixtures::{vcpe_elastic, AclPreset};
use scenario::{run_scenario, ScenarioConfig, ScenarioError};

#[test]
fn a_blocking_firewall_fails_admission_before_any_tick() {
    let cfg = ScenarioConfig::ramp_demo();
    // this preset denies all three service ports, so every builtin
    // reachability policy fails while the isolations still hold
    let g = vcpe_elastic(1, AclPreset::DenyServicePorts);
    let policies = scenario::config::builtin_policies();
    match run_scenario(&cfg, &g, &policies) {
        Err(ScenarioError::DeploymentRejected { report, failing, total }) => {
            assert_eq!(total, 6);
            assert_eq!(failing, 3);
            let holds: Vec<bool> = report
                .items
                .iter()
                .map(|it| it.verdict.as_ref().is_some_and(|v| v.holds))
                .collect();
            assert_eq!(holds, [false, false, false, true, true, true]);
        }
        other => panic!("expected DeploymentRejected, got {other:?}"),
    }
}

#[test]
fn rejection_reports_which_fraction_failed() {
    let cfg = ScenarioConfig::ramp_demo();
    let g = vcpe_elastic(1, AclPreset::DenyServicePorts);
    let err = run_scenario(&cfg, &g, &scenario::config::builtin_policies()).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("3 of 6"), "{msg}");
}

#[test]
fn an_oversized_or_invalid_initial_fleet_is_refused() {
    let mut cfg = ScenarioConfig::ramp_demo();
    cfg.max_firewalls = 2;
    let g = vcpe_elastic(3, AclPreset::PermitAll);
    let err = run_scenario(&cfg, &g, &scenario::config::builtin_policies()).unwrap_err();
    assert!(matches!(err, ScenarioError::Graph(_)), "{err:?}");
}

#[test]
fn missing_graph_or_policy_files_surface_as_io_errors() {
    let mut cfg = ScenarioConfig::ramp_demo();
    cfg.graph = "/nonexistent/graph.json".into();
    let err = scenario::run_from_config(&cfg).unwrap_err();
    assert!(matches!(err, ScenarioError::Io(_)), "{err:?}");

    let mut cfg = ScenarioConfig::ramp_demo();
    cfg.policies = "/nonexistent/policies.json".into();
    let err = scenario::run_from_config(&cfg).unwrap_err();
    assert!(matches!(err, ScenarioError::Io(_)), "{err:?}");
}

#[test]
fn an_invalid_config_is_refused_before_running() {
    let mut cfg = ScenarioConfig::ramp_demo();
    cfg.sustain = 0;
    let g = vcpe_elastic(1, AclPreset::PermitAll);
    let err = run_scenario(&cfg, &g, &scenario::config::builtin_policies()).unwrap_err();
    assert!(matches!(err, ScenarioError::Config(_)), "{err:?}");
}
