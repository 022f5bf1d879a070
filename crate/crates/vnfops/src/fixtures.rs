// SPDX-License-Identifier: Apache-2.0

//! Canonical on-disk fixtures for the CLI and the acceptance suite.
//!
//! Everything under `fixtures/` at the workspace root is generated from
//! [`fixture_files`] by `cargo run -p vnfops --example gen_fixtures`; a test
//! compares the checked-in bytes against regeneration so the two cannot
//! drift apart.

use std::collections::BTreeMap;

use nffg_core::fixtures::{vcpe_elastic, AclPreset};
use nffg_core::pc::IntervalSet;
use scenario::{builtin_policies, ScenarioConfig, Snapshot};
use verifier::{policies_to_json, Policy};

/// End state with one gateway instance hogging 90 % of the offered load
/// while the fleet kept growing — the situation the stock troubleshooting
/// graph pins on the load balancer.
pub fn skewed_snapshot() -> Snapshot {
    let offered = 50.0;
    let shares = vec![0.9, 0.1];
    let g = vcpe_elastic(shares.len(), AclPreset::PermitAll);
    let graph = serde_json::from_str(&nffg_core::io::to_json_string(&g))
        .expect("generated graph round-trips");
    let mut port_mean_mbps = BTreeMap::new();
    let mut port_risk = BTreeMap::new();
    for (i, share) in shares.iter().enumerate() {
        for port in ["in", "out"] {
            let key = format!("fw{}:{port}", i + 1);
            port_mean_mbps.insert(key.clone(), share * offered);
            port_risk.insert(key, if share * offered > 80.0 { 0.2 } else { 0.01 });
        }
    }
    Snapshot {
        graph,
        capacity: 100.0,
        offered_total: offered,
        shares,
        port_mean_mbps,
        port_risk,
        instance_history: vec![(100, 1), (6_000, 2)],
    }
}

/// The stock policies with their destination-port pins lifted. The
/// enumeration cross-check only sees the low end of every header field, so
/// a policy pinned to a real service port is invisible to it; this set keeps
/// the same intent expressed purely through app classes and spam flags.
pub fn oracle_policies() -> Vec<Policy> {
    builtin_policies()
        .into_iter()
        .map(|mut p| {
            p.traffic.dst_port = IntervalSet::from_intervals([(0, 65_535)]);
            p
        })
        .collect()
}

/// Every fixture as `(file name, contents)`, in the order they are written.
pub fn fixture_files() -> Vec<(&'static str, String)> {
    let permit = vcpe_elastic(1, AclPreset::PermitAll);
    let deny = vcpe_elastic(1, AclPreset::DenyServicePorts);
    vec![
        ("vcpe.json", nffg_core::io::to_json_string(&permit)),
        ("vcpe_deny.json", nffg_core::io::to_json_string(&deny)),
        ("policies.json", policies_to_json(&builtin_policies())),
        ("oracle_policies.json", policies_to_json(&oracle_policies())),
        ("flat.toml", ScenarioConfig::flat_demo().to_toml_string()),
        ("ramp.toml", ScenarioConfig::ramp_demo().to_toml_string()),
        ("elastic_fw.tsg", troubleshooter::elastic_firewall_tsg().to_string()),
        ("skewed_snapshot.json", skewed_snapshot().to_json()),
    ]
}
