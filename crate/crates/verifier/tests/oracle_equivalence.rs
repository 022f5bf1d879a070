// SPDX-License-Identifier: Apache-2.0

//! The symbolic engine must agree with brute-force packet enumeration on
//! randomized chain topologies, reachability and isolation must be exact
//! complements, and every reachability witness must replay concretely.

use nffg_core::io::to_json_string;
use nffg_core::VnfKind;
use verifier::oracle::{class_contains, OracleError};
use verifier::policy::PolicyKind;
use verifier::{
    check_isolation, check_reachability, generate_case, oracle_reachability, trace_packet,
    Terminal,
};

const DOMAIN_BITS: u8 = 8;
const SEEDS: u64 = 150;

#[test]
fn engine_matches_enumeration_oracle_on_random_chains() {
    let mut fan_cases = 0;
    for seed in 0..SEEDS {
        let case = generate_case(seed);
        if case
            .graph
            .nodes
            .values()
            .any(|n| n.kind == VnfKind::LoadBalancer)
        {
            fan_cases += 1;
        }
        let truth = oracle_reachability(&case.graph, &case.policy, DOMAIN_BITS).unwrap();
        let verdict = match case.policy.kind {
            PolicyKind::Reachability => check_reachability(&case.graph, &case.policy),
            PolicyKind::Isolation => check_isolation(&case.graph, &case.policy),
        }
        .unwrap_or_else(|e| panic!("seed {seed}: engine error {e}"));
        let expected = match case.policy.kind {
            PolicyKind::Reachability => truth,
            PolicyKind::Isolation => !truth,
        };
        assert_eq!(
            verdict.holds, expected,
            "seed {seed}: engine disagrees with enumeration\n{}",
            to_json_string(&case.graph)
        );
    }
    assert!(
        fan_cases >= 20,
        "want real balancer coverage, got {fan_cases} fan cases"
    );
}

#[test]
fn reachability_and_isolation_are_exact_complements() {
    for seed in 0..60 {
        let case = generate_case(seed);
        let reach = check_reachability(&case.graph, &case.policy).unwrap();
        let iso = check_isolation(&case.graph, &case.policy).unwrap();
        assert_ne!(reach.holds, iso.holds, "seed {seed}");
    }
}

#[test]
fn witnesses_replay_through_the_concrete_tracer() {
    let mut replayed = 0;
    for seed in 0..SEEDS {
        let case = generate_case(seed);
        let verdict = check_reachability(&case.graph, &case.policy).unwrap();
        let Some(w) = verdict.witness else { continue };
        assert!(
            class_contains(&case.policy.traffic, &w.packet),
            "seed {seed}: witness packet lies outside the policy traffic"
        );
        assert_eq!(w.path.first(), Some(&case.policy.from), "seed {seed}");
        assert_eq!(w.path.last(), Some(&case.policy.to), "seed {seed}");
        let arrived = trace_packet(&case.graph, &case.policy.from, w.packet.clone())
            .iter()
            .any(|t| t.terminal == Terminal::Arrived(case.policy.to.clone()));
        assert!(arrived, "seed {seed}: witness does not replay to the server");
        replayed += 1;
    }
    assert!(replayed >= 30, "too few witnesses exercised: {replayed}");
}

#[test]
fn the_same_seed_reproduces_case_and_verdict() {
    let (a, b) = (generate_case(42), generate_case(42));
    assert_eq!(to_json_string(&a.graph), to_json_string(&b.graph));
    assert_eq!(a.policy, b.policy);
    let va = check_reachability(&a.graph, &a.policy).unwrap();
    let vb = check_reachability(&b.graph, &b.policy).unwrap();
    assert_eq!(va.holds, vb.holds);
    assert_eq!(va.witness, vb.witness);
}

#[test]
fn oversized_domains_are_refused() {
    let case = generate_case(7);
    assert_eq!(
        oracle_reachability(&case.graph, &case.policy, 9),
        Err(OracleError::DomainTooLarge(9))
    );
}
