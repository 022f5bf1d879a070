// SPDX-License-Identifier: Apache-2.0

//! Seeded fixture generator: random linear service chains (optionally with
//! a balancer fan-out) plus one policy each, everything confined to the
//! 8-bit reduced header domain so the enumeration oracle is exact. The same
//! seed always yields the same case.

use nffg_core::graph::{EndpointRole, Link, Nffg, NodeId, PortId, Rule, VnfInstance};
use nffg_core::pc::{
    partition_domain, AppClass, AppClassSet, IntervalSet, PacketClass, Proto, ProtoSet, SpamFlag,
    SpamFlagSet,
};
use nffg_core::vnf::{AclAction, AclRule, VnfConfig};
use rand::prelude::IndexedRandom;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::policy::{Policy, PolicyKind};

/// Largest interval-field value of the reduced domain (8 bits round-robin
/// over four fields = 2 bits each).
pub const SMALL_MAX: u32 = 3;

pub struct GeneratedCase {
    pub seed: u64,
    pub graph: Nffg,
    pub policy: Policy,
}

fn small_set(rng: &mut ChaCha8Rng) -> IntervalSet {
    let n = rng.random_range(1..=2);
    IntervalSet::from_intervals((0..n).map(|_| {
        let a = rng.random_range(0..=SMALL_MAX);
        let b = rng.random_range(0..=SMALL_MAX);
        (a.min(b), a.max(b))
    }))
}

fn small_class(rng: &mut ChaCha8Rng) -> PacketClass {
    let mut pc = PacketClass::full();
    if rng.random_bool(0.5) {
        pc = pc.with_src_ip(small_set(rng));
    }
    if rng.random_bool(0.5) {
        pc = pc.with_dst_ip(small_set(rng));
    }
    if rng.random_bool(0.5) {
        pc = pc.with_src_port(small_set(rng));
    }
    if rng.random_bool(0.5) {
        pc = pc.with_dst_port(small_set(rng));
    }
    if rng.random_bool(0.4) {
        let protos: Vec<Proto> = Proto::ALL
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if !protos.is_empty() {
            pc = pc.with_proto(protos.into_iter().collect::<ProtoSet>());
        }
    }
    if rng.random_bool(0.4) {
        let apps: Vec<AppClass> = AppClass::ALL
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if !apps.is_empty() {
            pc = pc.with_app_class(apps.into_iter().collect::<AppClassSet>());
        }
    }
    if rng.random_bool(0.4) {
        let flags: Vec<SpamFlag> = SpamFlag::ALL
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if !flags.is_empty() {
            pc = pc.with_spam_flag(flags.into_iter().collect::<SpamFlagSet>());
        }
    }
    pc
}

/// Traffic for generated policies: every interval field stays inside the
/// reduced domain so enumeration sees the whole class; a full field would
/// let the symbolic engine find paths on values the oracle never visits.
fn small_traffic(rng: &mut ChaCha8Rng) -> PacketClass {
    let mut pc = PacketClass::full()
        .with_src_ip(small_set(rng))
        .with_dst_ip(small_set(rng))
        .with_src_port(small_set(rng))
        .with_dst_port(small_set(rng));
    if rng.random_bool(0.4) {
        let flags: Vec<SpamFlag> = SpamFlag::ALL
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if !flags.is_empty() {
            pc = pc.with_spam_flag(flags.into_iter().collect::<SpamFlagSet>());
        }
    }
    if rng.random_bool(0.4) {
        let apps: Vec<AppClass> = AppClass::ALL
            .iter()
            .copied()
            .filter(|_| rng.random_bool(0.6))
            .collect();
        if !apps.is_empty() {
            pc = pc.with_app_class(apps.into_iter().collect::<AppClassSet>());
        }
    }
    pc
}

fn random_acl(rng: &mut ChaCha8Rng) -> VnfConfig {
    let n_rules = rng.random_range(0..=3);
    let rules = (0..n_rules)
        .map(|_| AclRule {
            matches: small_class(rng),
            action: if rng.random_bool(0.6) {
                AclAction::Deny
            } else {
                AclAction::Permit
            },
        })
        .collect();
    VnfConfig::AclFw {
        rules,
        default: if rng.random_bool(0.3) {
            AclAction::Deny
        } else {
            AclAction::Permit
        },
    }
}

fn random_nat(rng: &mut ChaCha8Rng) -> VnfConfig {
    let a = rng.random_range(0..=SMALL_MAX);
    let b = rng.random_range(0..=SMALL_MAX);
    VnfConfig::Nat {
        internal_prefix: IntervalSet::range(a.min(b), a.max(b)),
        // sometimes translate within the domain, sometimes out of it
        public_ip: if rng.random_bool(0.5) {
            rng.random_range(0..=SMALL_MAX)
        } else {
            rng.random_range(8..16)
        },
    }
}

enum Segment {
    Single(VnfConfig),
    /// Balancer fanning out to parallel firewalls that merge at the next node.
    Fan(Vec<VnfConfig>),
}

/// Builds a random valid chain graph plus a matching policy.
pub fn generate_case(seed: u64) -> GeneratedCase {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut segments = Vec::new();
    for _ in 0..rng.random_range(0..=4usize) {
        let config = match rng.random_range(0..4u8) {
            0 => VnfConfig::Antispam,
            1 => VnfConfig::WebCache,
            2 => random_acl(&mut rng),
            _ => random_nat(&mut rng),
        };
        segments.push(Segment::Single(config));
    }
    if rng.random_bool(0.3) {
        let fan = (0..rng.random_range(2..=3usize))
            .map(|_| random_acl(&mut rng))
            .collect();
        let at = rng.random_range(0..=segments.len());
        segments.insert(at, Segment::Fan(fan));
    }

    let mut g = Nffg {
        version: 1,
        ..Default::default()
    };
    let add_node = |g: &mut Nffg, id: &str, config: VnfConfig, ports: Vec<&str>| {
        g.nodes.insert(
            NodeId::from(id),
            VnfInstance {
                id: NodeId::from(id),
                kind: config.kind(),
                config,
                ports: ports.into_iter().map(PortId::from).collect(),
            },
        );
    };
    let wire = |g: &mut Nffg, from: (&str, &str), to: (&str, &str)| {
        g.links.push(Link {
            from: (NodeId::from(from.0), PortId::from(from.1)),
            to: (NodeId::from(to.0), PortId::from(to.1)),
        });
    };
    let full_rule = |g: &mut Nffg, node: &str, port: &str| {
        g.rules.insert(
            NodeId::from(node),
            vec![Rule {
                priority: 0,
                matches: PacketClass::full(),
                out_port: PortId::from(port),
            }],
        );
    };

    add_node(&mut g, "client", VnfConfig::Endpoint, vec!["out"]);
    full_rule(&mut g, "client", "out");
    add_node(&mut g, "server", VnfConfig::Endpoint, vec!["in"]);
    g.endpoints.insert(NodeId::from("client"), EndpointRole::Client);
    g.endpoints.insert(NodeId::from("server"), EndpointRole::Server);

    // materialize segments into (entry node, exit spec) pieces, then wire
    // consecutive pieces together
    struct Piece {
        entry: String,
        exits: Vec<(String, String)>, // (node, port) needing a link onward
    }
    let mut pieces = vec![Piece {
        entry: "client".into(),
        exits: vec![("client".into(), "out".into())],
    }];
    for (i, seg) in segments.into_iter().enumerate() {
        match seg {
            Segment::Single(config) => {
                let id = format!(
                    "{}{i}",
                    match &config {
                        VnfConfig::Antispam => "as",
                        VnfConfig::WebCache => "wc",
                        VnfConfig::AclFw { .. } => "fw",
                        VnfConfig::Nat { .. } => "nat",
                        _ => "v",
                    }
                );
                add_node(&mut g, &id, config, vec!["in", "out"]);
                full_rule(&mut g, &id, "out");
                pieces.push(Piece {
                    entry: id.clone(),
                    exits: vec![(id, "out".into())],
                });
            }
            Segment::Fan(configs) => {
                let lb_id = format!("lb{i}");
                let n = configs.len();
                let fw_ids: Vec<String> =
                    (0..n).map(|k| format!("fw{i}x{k}")).collect();
                let mut lb_ports = vec!["in".to_string()];
                lb_ports.extend((0..n).map(|k| format!("b{k}")));
                g.nodes.insert(
                    NodeId::from(lb_id.as_str()),
                    VnfInstance {
                        id: NodeId::from(lb_id.as_str()),
                        kind: nffg_core::vnf::VnfKind::LoadBalancer,
                        config: VnfConfig::LoadBalancer {
                            backends: fw_ids.iter().map(|s| NodeId::from(s.as_str())).collect(),
                        },
                        ports: lb_ports.iter().map(|p| PortId::from(p.as_str())).collect(),
                    },
                );
                g.rules.insert(
                    NodeId::from(lb_id.as_str()),
                    partition_domain(n)
                        .into_iter()
                        .enumerate()
                        .map(|(k, bucket)| Rule {
                            priority: k as u32,
                            matches: PacketClass::full().with_src_ip(bucket),
                            out_port: PortId::new(format!("b{k}")),
                        })
                        .collect(),
                );
                let mut exits = Vec::new();
                for (k, (fw, config)) in fw_ids.iter().zip(configs).enumerate() {
                    add_node(&mut g, fw, config, vec!["in", "out"]);
                    full_rule(&mut g, fw, "out");
                    wire(&mut g, (&lb_id, &format!("b{k}")), (fw, "in"));
                    exits.push((fw.clone(), "out".to_string()));
                }
                pieces.push(Piece {
                    entry: lb_id,
                    exits,
                });
            }
        }
    }
    pieces.push(Piece {
        entry: "server".into(),
        exits: vec![],
    });
    for w in pieces.windows(2) {
        for (node, port) in &w[0].exits {
            wire(&mut g, (node, port), (&w[1].entry, "in"));
        }
    }
    g.normalize();
    debug_assert_eq!(g.validate(), Vec::new(), "seed {seed}");

    let kind = *[PolicyKind::Reachability, PolicyKind::Isolation]
        .choose(&mut rng)
        .unwrap();
    let policy = Policy {
        kind,
        from: NodeId::from("client"),
        to: NodeId::from("server"),
        traffic: small_traffic(&mut rng),
    };
    GeneratedCase {
        seed,
        graph: g,
        policy,
    }
}

/// The static gateway fixture rescaled into the reduced domain so the
/// enumeration oracle can exercise it: internal sources [0,1] translate to
/// 3, and the deny preset blocks destination ports [0,2].
pub fn vcpe_small(preset: nffg_core::fixtures::AclPreset) -> Nffg {
    use nffg_core::fixtures::AclPreset;
    let mut g = nffg_core::fixtures::vcpe_static(AclPreset::PermitAll);
    g.nodes.get_mut(&NodeId::from("nat")).unwrap().config = VnfConfig::Nat {
        internal_prefix: IntervalSet::range(0, 1),
        public_ip: 3,
    };
    if preset == AclPreset::DenyServicePorts {
        g.nodes.get_mut(&NodeId::from("acl")).unwrap().config = VnfConfig::AclFw {
            rules: vec![AclRule {
                matches: PacketClass::full().with_dst_port(IntervalSet::range(0, 2)),
                action: AclAction::Deny,
            }],
            default: AclAction::Permit,
        };
    }
    debug_assert_eq!(g.validate(), Vec::new());
    g
}
