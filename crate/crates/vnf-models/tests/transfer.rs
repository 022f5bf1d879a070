// SPDX-License-Identifier: Apache-2.0

//! Per-kind transfer semantics: pinned examples, then the partition law
//! checked by concrete enumeration — every packet of the input class must
//! take exactly one MUST branch or land in the MAY group for its sub-class,
//! and no packet outside the input is consumed at all.

use nffg_core::graph::{NodeId, PortId, VnfInstance};
use nffg_core::pc::{
    AppClass, AppClassSet, ConcretePacket, IntervalSet, PacketClass, Proto, SpamFlag, SpamFlagSet,
};
use nffg_core::vnf::{AclAction, AclRule, VnfConfig};
use proptest::prelude::*;
use vnf_models::{
    nat_roundtrip, swap_endpoints, transfer, BranchKind, Direction, Disposition, NatBindingTable,
    Outcome, TransferError,
};

const SMALL_MAX: u32 = 3;

fn inst(id: &str, config: VnfConfig) -> VnfInstance {
    let ports = match &config {
        VnfConfig::LoadBalancer { backends } => {
            let mut p = vec![PortId::from("in")];
            p.extend((0..backends.len()).map(|i| PortId::new(format!("b{i}"))));
            p
        }
        _ => vec![PortId::from("in"), PortId::from("out")],
    };
    VnfInstance {
        id: NodeId::from(id),
        kind: config.kind(),
        config,
        ports,
    }
}

fn run(config: VnfConfig, input: &PacketClass, dir: Direction) -> Vec<Outcome> {
    let mut state = NatBindingTable::new();
    transfer(&inst("n", config), input, dir, &mut state, false).unwrap()
}

#[test]
fn nat_rewrites_internal_sources_and_records_binding() {
    let config = VnfConfig::Nat {
        internal_prefix: IntervalSet::range(0, 100),
        public_ip: 300,
    };
    let input = PacketClass::full()
        .with_src_ip(IntervalSet::range(10, 20))
        .with_dst_ip(IntervalSet::single(500));
    let node = inst("nat", config);
    let mut state = NatBindingTable::new();
    let out = transfer(&node, &input, Direction::ForwardPath, &mut state, true).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].branch, BranchKind::Must);
    assert_eq!(out[0].disposition, Disposition::Forward(None));
    assert_eq!(out[0].klass.src_ip, IntervalSet::single(300));
    assert_eq!(out[0].klass.dst_ip, IntervalSet::single(500));
    assert_eq!(out[0].consumed, input);
    assert_eq!(
        state.nat_bound(&NodeId::from("nat")),
        Some(&IntervalSet::range(10, 20))
    );
}

#[test]
fn acl_splits_deny_rule_from_permit_default() {
    let config = VnfConfig::AclFw {
        rules: vec![AclRule {
            matches: PacketClass::full().with_dst_port(IntervalSet::single(25)),
            action: AclAction::Deny,
        }],
        default: AclAction::Permit,
    };
    let out = run(config, &PacketClass::full(), Direction::ForwardPath);
    let drops: Vec<&Outcome> = out
        .iter()
        .filter(|o| o.disposition == Disposition::Drop)
        .collect();
    let fwds: Vec<&Outcome> = out
        .iter()
        .filter(|o| o.disposition == Disposition::Forward(None))
        .collect();
    assert_eq!(drops.len(), 1);
    assert_eq!(drops[0].klass.dst_port, IntervalSet::single(25));
    assert_eq!(fwds.len(), 1);
    assert_eq!(
        fwds[0].klass.dst_port,
        IntervalSet::full().subtract(&IntervalSet::single(25))
    );
}

#[test]
fn antispam_drops_spam_and_forwards_ham() {
    let out = run(VnfConfig::Antispam, &PacketClass::full(), Direction::ForwardPath);
    assert_eq!(out.len(), 2);
    let spam = out
        .iter()
        .find(|o| o.disposition == Disposition::Drop)
        .unwrap();
    assert_eq!(spam.klass.spam_flag, SpamFlagSet::single(SpamFlag::Spam));
    let ham = out
        .iter()
        .find(|o| o.disposition == Disposition::Forward(None))
        .unwrap();
    assert_eq!(ham.klass.spam_flag, SpamFlagSet::single(SpamFlag::Ham));
    // the two consumed classes partition the input exactly
    assert!(spam.consumed.intersect(&ham.consumed).is_empty());
    let mut union = spam.consumed.union_classes(&ham.consumed);
    union.sort();
    assert_eq!(union.len(), 2);
}

#[test]
fn cache_offers_hit_and_miss_on_web_only() {
    let out = run(VnfConfig::WebCache, &PacketClass::full(), Direction::ForwardPath);
    let web = PacketClass::full().with_app_class(AppClassSet::single(AppClass::Web));
    let hits: Vec<&Outcome> = out
        .iter()
        .filter(|o| o.disposition == Disposition::AnswerLocally)
        .collect();
    assert_eq!(hits.len(), 1);
    assert_eq!(hits[0].branch, BranchKind::May);
    assert_eq!(hits[0].klass, web);
    let misses: Vec<&Outcome> = out
        .iter()
        .filter(|o| o.branch == BranchKind::May && o.disposition == Disposition::Forward(None))
        .collect();
    assert_eq!(misses.len(), 1);
    assert_eq!(misses[0].klass, web);
    // non-web traffic passes unconditionally
    for o in out.iter().filter(|o| o.branch == BranchKind::Must) {
        assert!(o.klass.app_class.intersect(AppClassSet::single(AppClass::Web)).is_empty());
        assert_eq!(o.disposition, Disposition::Forward(None));
    }
}

#[test]
fn balancer_routes_each_bucket_to_its_backend_port() {
    let config = VnfConfig::LoadBalancer {
        backends: vec![NodeId::from("fw1"), NodeId::from("fw2"), NodeId::from("fw3")],
    };
    let out = run(config, &PacketClass::full(), Direction::ForwardPath);
    assert_eq!(out.len(), 3);
    let buckets = nffg_core::pc::partition_domain(3);
    for (i, o) in out.iter().enumerate() {
        assert_eq!(o.branch, BranchKind::Must);
        assert_eq!(o.disposition, Disposition::Forward(Some(PortId::new(format!("b{i}")))));
        assert_eq!(o.klass.src_ip, buckets[i]);
        assert_eq!(o.consumed, o.klass);
    }
}

#[test]
fn unbound_return_class_errors_strict_and_drops_lenient() {
    let config = VnfConfig::Nat {
        internal_prefix: IntervalSet::range(0, 100),
        public_ip: 300,
    };
    let reply = PacketClass::full().with_dst_ip(IntervalSet::single(300));
    let node = inst("nat", config);

    let mut state = NatBindingTable::new();
    let err =
        transfer(&node, &reply, Direction::ReturnPath, &mut state, true).unwrap_err();
    assert_eq!(
        err,
        TransferError::UnknownBinding {
            node: NodeId::from("nat")
        }
    );

    let mut state = NatBindingTable::new();
    let out = transfer(&node, &reply, Direction::ReturnPath, &mut state, false).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].disposition, Disposition::Drop);
}

#[test]
fn nat_roundtrip_is_identity_on_bound_classes() {
    let config = VnfConfig::Nat {
        internal_prefix: IntervalSet::range(0, 4095),
        public_ip: 40000,
    };
    let input = PacketClass::full()
        .with_src_ip(IntervalSet::from_intervals([(5, 5), (9, 9)])) // two internal hosts
        .with_dst_ip(IntervalSet::single(50000))
        .with_src_port(IntervalSet::range(1024, 2048))
        .with_dst_port(IntervalSet::single(80));
    assert_eq!(nat_roundtrip(&config, &input), input);
}

#[test]
fn vpn_encapsulates_and_decapsulates_through_binding() {
    let config = VnfConfig::VpnGw {
        tunnel_src: 60000,
        tunnel_dst: 60001,
        inner_prefix: IntervalSet::range(0, 255),
    };
    let node = inst("vpn", config);
    let input = PacketClass::full()
        .with_src_ip(IntervalSet::range(10, 12))
        .with_dst_ip(IntervalSet::single(9000))
        .with_dst_port(IntervalSet::single(443));
    let mut state = NatBindingTable::new();
    let out = transfer(&node, &input, Direction::ForwardPath, &mut state, true).unwrap();
    assert_eq!(out.len(), 1);
    assert_eq!(out[0].klass.src_ip, IntervalSet::single(60000));
    assert_eq!(out[0].klass.dst_ip, IntervalSet::single(60001));

    // the reply to the encapsulated class decapsulates back to the swapped inner
    let reply = swap_endpoints(&out[0].klass);
    let back = transfer(&node, &reply, Direction::ReturnPath, &mut state, true).unwrap();
    let restored: Vec<&Outcome> = back
        .iter()
        .filter(|o| o.disposition == Disposition::Forward(None) && o.branch == BranchKind::May)
        .collect();
    assert_eq!(restored.len(), 1);
    assert_eq!(swap_endpoints(&restored[0].klass), input);

    // with no binding the same reply is dead
    let mut empty_state = NatBindingTable::new();
    let err = transfer(&node, &reply, Direction::ReturnPath, &mut empty_state, true).unwrap_err();
    assert!(matches!(err, TransferError::UnknownBinding { .. }));
}

// ---- property tests over the reduced domain ----

fn all_small_packets() -> Vec<ConcretePacket> {
    let mut out = Vec::new();
    for src_ip in 0..=SMALL_MAX {
        for dst_ip in 0..=SMALL_MAX {
            for src_port in 0..=SMALL_MAX {
                for dst_port in 0..=SMALL_MAX {
                    for &proto in Proto::ALL {
                        for &app_class in AppClass::ALL {
                            for &spam_flag in SpamFlag::ALL {
                                out.push(ConcretePacket {
                                    src_ip,
                                    dst_ip,
                                    src_port,
                                    dst_port,
                                    proto,
                                    app_class,
                                    spam_flag,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn small_iset() -> impl Strategy<Value = IntervalSet> {
    prop::collection::vec((0..=SMALL_MAX, 0..=SMALL_MAX), 1..=2).prop_map(|pairs| {
        IntervalSet::from_intervals(pairs.into_iter().map(|(a, b)| (a.min(b), a.max(b))))
    })
}

fn small_class() -> impl Strategy<Value = PacketClass> {
    (small_iset(), small_iset(), small_iset(), small_iset(), 0u8..3).prop_map(
        |(a, b, c, d, flavor)| {
            let pc = PacketClass::full()
                .with_src_ip(a)
                .with_dst_ip(b)
                .with_src_port(c)
                .with_dst_port(d);
            match flavor {
                0 => pc,
                1 => pc.with_app_class(AppClassSet::single(AppClass::Web)),
                _ => pc.with_spam_flag(SpamFlagSet::single(SpamFlag::Ham)),
            }
        },
    )
}

fn any_config() -> impl Strategy<Value = VnfConfig> {
    let acl_rule = (small_class(), prop::bool::ANY).prop_map(|(matches, deny)| AclRule {
        matches,
        action: if deny { AclAction::Deny } else { AclAction::Permit },
    });
    prop_oneof![
        Just(VnfConfig::Endpoint),
        Just(VnfConfig::Antispam),
        Just(VnfConfig::WebCache),
        (prop::collection::vec(acl_rule, 0..3), prop::bool::ANY).prop_map(|(rules, deny)| {
            VnfConfig::AclFw {
                rules,
                default: if deny { AclAction::Deny } else { AclAction::Permit },
            }
        }),
        Just(VnfConfig::Nat {
            internal_prefix: IntervalSet::range(0, 1),
            public_ip: 3,
        }),
        Just(VnfConfig::VpnGw {
            tunnel_src: 2,
            tunnel_dst: 3,
            inner_prefix: IntervalSet::range(0, 1),
        }),
        (2usize..4).prop_map(|n| VnfConfig::LoadBalancer {
            backends: (0..n).map(|i| NodeId::new(format!("fw{i}"))).collect(),
        }),
    ]
}

/// The partition law, enumerated: within the input every packet is consumed
/// by exactly one MUST branch or by MAY branches only; outside the input,
/// nothing is consumed.
fn assert_partition(input: &PacketClass, outcomes: &[Outcome]) {
    for p in all_small_packets() {
        let must = outcomes
            .iter()
            .filter(|o| o.branch == BranchKind::Must && o.consumed.contains(&p))
            .count();
        let may = outcomes
            .iter()
            .filter(|o| o.branch == BranchKind::May && o.consumed.contains(&p))
            .count();
        if input.contains(&p) {
            assert!(
                (must == 1 && may == 0) || (must == 0 && may >= 1),
                "packet {p:?}: {must} MUST / {may} MAY branches"
            );
        } else {
            assert_eq!(must + may, 0, "packet {p:?} outside input was consumed");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 300, ..ProptestConfig::default() })]

    #[test]
    fn every_kind_obeys_the_partition_law(config in any_config(), input in small_class()) {
        for dir in [Direction::ForwardPath, Direction::ReturnPath] {
            let mut state = NatBindingTable::new();
            // seed a binding so return paths have something to translate through
            if matches!(config, VnfConfig::Nat { .. } | VnfConfig::VpnGw { .. }) {
                let node = inst("n", config.clone());
                let _ = transfer(&node, &PacketClass::full(), Direction::ForwardPath, &mut state, false);
            }
            let out = transfer(&inst("n", config.clone()), &input, dir, &mut state, false).unwrap();
            assert_partition(&input, &out);
        }
    }

    #[test]
    fn passive_kinds_never_alter_headers(input in small_class(), deny_default in prop::bool::ANY) {
        let acl = VnfConfig::AclFw {
            rules: vec![AclRule {
                matches: PacketClass::full().with_dst_port(IntervalSet::single(2)),
                action: AclAction::Deny,
            }],
            default: if deny_default { AclAction::Deny } else { AclAction::Permit },
        };
        for config in [VnfConfig::Antispam, acl] {
            for o in run(config.clone(), &input, Direction::ForwardPath) {
                prop_assert_eq!(&o.klass, &o.consumed);
            }
        }
    }

    #[test]
    fn fully_denied_classes_have_no_escaping_subclass(
        input in small_class(),
        sub in small_class(),
    ) {
        // deny rule on low destination ports, permissive default
        let denied_ports = IntervalSet::range(0, 2);
        let config = VnfConfig::AclFw {
            rules: vec![AclRule {
                matches: PacketClass::full().with_dst_port(denied_ports.clone()),
                action: AclAction::Deny,
            }],
            default: AclAction::Permit,
        };
        // force the class inside the denied region
        let denied = input.clone().with_dst_port(input.dst_port.intersect(&denied_ports));
        prop_assume!(!denied.is_empty());
        for o in run(config.clone(), &denied, Direction::ForwardPath) {
            prop_assert_eq!(o.disposition, Disposition::Drop);
        }
        let subclass = denied.intersect(&sub);
        if !subclass.is_empty() {
            for o in run(config, &subclass, Direction::ForwardPath) {
                prop_assert_eq!(o.disposition, Disposition::Drop);
            }
        }
    }

    #[test]
    fn nat_roundtrip_identity_property(input in small_class()) {
        let config = VnfConfig::Nat {
            internal_prefix: IntervalSet::range(0, SMALL_MAX),
            public_ip: 3,
        };
        // inputs from small_class already satisfy src ⊆ [0, SMALL_MAX]
        prop_assert_eq!(nat_roundtrip(&config, &input), input);
    }
}
