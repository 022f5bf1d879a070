// SPDX-License-Identifier: Apache-2.0

//! The stock elastic-firewall procedure against four constructed end
//! states: skewed/even CPU × static/growing fleet. Each case must reach
//! the hand-computed verdict, fast, deterministically, and independently
//! of concrete node names.

use std::collections::BTreeMap;
use std::time::Instant;

use nffg_core::fixtures::{vcpe_elastic, AclPreset};
use scenario::Snapshot;
use troubleshooter::{
    elastic_firewall_tsg, parse_tsg, run_tsg, SimHandle, StepAction, Value,
};

/// Two-instance end state. After the procedure's `traffic_gen(50, 5)` the
/// offered load becomes `offered + 50`.
fn snapshot(shares: [f64; 2], offered: f64, growing: bool) -> Snapshot {
    let g = vcpe_elastic(2, AclPreset::PermitAll);
    let graph = serde_json::from_str(&nffg_core::io::to_json_string(&g)).unwrap();
    let mut port_mean_mbps = BTreeMap::new();
    let mut port_risk = BTreeMap::new();
    for (i, share) in shares.iter().enumerate() {
        for port in ["in", "out"] {
            let key = format!("fw{}:{port}", i + 1);
            port_mean_mbps.insert(key.clone(), share * offered);
            port_risk.insert(key, 0.01);
        }
    }
    Snapshot {
        graph,
        capacity: 100.0,
        offered_total: offered,
        shares: shares.to_vec(),
        port_mean_mbps,
        port_risk,
        instance_history: if growing {
            vec![(100, 1), (6_000, 2)]
        } else {
            vec![(100, 2), (6_000, 2)]
        },
    }
}

fn diagnose(snap: &Snapshot) -> troubleshooter::Diagnosis {
    let tsg = parse_tsg(elastic_firewall_tsg()).expect("stock text parses");
    let mut sim = SimHandle::from_snapshot(snap).expect("snapshot is consistent");
    run_tsg(&tsg, &mut sim).expect("procedure completes")
}

#[test]
fn all_four_constructed_states_reach_their_hand_computed_verdicts() {
    let started = Instant::now();

    // cpu [90, 10]: stdev/mean = 40/50 = 0.8 > 0.5 — skew wins regardless
    // of fleet history
    let skewed_static = diagnose(&snapshot([0.9, 0.1], 50.0, false));
    assert_eq!(skewed_static.verdict, "debug LoadBalancer");
    let skewed_growing = diagnose(&snapshot([0.9, 0.1], 50.0, true));
    assert_eq!(skewed_growing.verdict, "debug LoadBalancer");

    // even cpu, loaded link (35 + 50 = 85 of 100 > 0.8) and a fleet that
    // did not react: the control app is the suspect
    let even_static = diagnose(&snapshot([0.5, 0.5], 35.0, false));
    assert_eq!(even_static.verdict, "debug ControlApp");

    // same load but the fleet is already growing: hypothesis rejected
    let even_growing = diagnose(&snapshot([0.5, 0.5], 35.0, true));
    assert_eq!(even_growing.verdict, "hypothesis rejected");

    assert!(
        started.elapsed().as_secs_f64() < 5.0,
        "four diagnoses took {:?}",
        started.elapsed()
    );
}

#[test]
fn the_diagnosis_records_the_full_tool_and_decision_path() {
    let dx = diagnose(&snapshot([0.9, 0.1], 50.0, false));
    let nodes: Vec<&str> = dx.steps.iter().map(|s| s.node.as_str()).collect();
    assert_eq!(
        nodes,
        ["overload", "fleet", "cachelnk", "cpus", "webprobe", "verdict", "s_lb"]
    );
    match &dx.steps[5].action {
        StepAction::Decision { chose } => assert_eq!(chose, "imbalanced"),
        other => panic!("expected the decision step, got {other:?}"),
    }
    match &dx.steps[3].action {
        StepAction::Tool(r) => {
            assert_eq!(r.values["cpu"], Value::List(vec![90.0, 10.0]));
        }
        other => panic!("expected the cpu probe, got {other:?}"),
    }
    // human trace mentions every verdict line
    let text = dx.to_string();
    assert!(text.contains("verdict: debug LoadBalancer"), "{text}");
    // machine form round-trips
    let back: troubleshooter::Diagnosis = serde_json::from_str(&dx.to_json()).unwrap();
    assert_eq!(back, dx);
}

#[test]
fn repeated_runs_on_the_same_snapshot_agree_exactly() {
    let snap = snapshot([0.5, 0.5], 35.0, false);
    assert_eq!(diagnose(&snap), diagnose(&snap));
}

#[test]
fn renaming_concrete_nodes_leaves_the_diagnosis_unchanged() {
    let snap = snapshot([0.9, 0.1], 50.0, false);
    // rename both firewall instances everywhere (graph ids, balancer
    // backends, rule targets, port-stat keys); roles stay intact
    let renamed_json = snap
        .to_json()
        .replace("fw1", "alpha")
        .replace("fw2", "bravo");
    let renamed = Snapshot::from_json(&renamed_json).expect("renamed snapshot parses");
    let g = renamed.nffg().expect("renamed graph still validates");
    assert!(g.instance(&"alpha".into()).is_some());
    assert!(g.instance(&"fw1".into()).is_none());

    let a = diagnose(&snap);
    let b = diagnose(&renamed);
    assert_eq!(b.verdict, a.verdict);
    let path = |d: &troubleshooter::Diagnosis| -> Vec<String> {
        d.steps
            .iter()
            .map(|s| match &s.action {
                StepAction::Tool(r) => format!("{}:{}", s.node, r.tool),
                StepAction::Decision { chose } => format!("{}->{chose}", s.node),
                StepAction::Sink { verdict } => format!("{}!{verdict}", s.node),
            })
            .collect()
    };
    assert_eq!(path(&b), path(&a));
}
