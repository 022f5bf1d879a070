// SPDX-License-Identifier: Apache-2.0

//! Reference graphs used across the workspace: a residential-gateway service
//! chain in two shapes. `vcpe_static` routes three application classes
//! through anti-spam / web-cache branches into a shared NAT + firewall.
//! `vcpe_elastic` inserts a load balancer fanning out to N parallel firewall
//! instances, the shape the scaling control loop grows and shrinks.

use crate::graph::{EndpointRole, Link, Nffg, NodeId, PortId, Rule, VnfInstance};
use crate::pc::{AppClass, AppClassSet, IntervalSet, PacketClass, partition_domain};
use crate::update::GraphUpdate;
use crate::vnf::{AclAction, AclRule, VnfConfig, VnfKind};

/// Source addresses considered "inside" and subject to translation.
pub const INTERNAL_PREFIX: (u32, u32) = (0, 4095);
/// Translated source address of all outbound traffic.
pub const PUBLIC_IP: u32 = 40000;
/// Well-known destination ports of the three server endpoints.
pub const EMAIL_PORT: u32 = 25;
pub const WEB_PORT: u32 = 80;
pub const OTHER_PORT: u32 = 8080;

/// The two firewall configurations exercised by the verification fixtures.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AclPreset {
    /// No rules, default PERMIT: every chain is reachable.
    PermitAll,
    /// One DENY rule on the three service ports, default PERMIT: every
    /// chain is blocked at the firewall (and only there).
    DenyServicePorts,
}

pub fn acl_config(preset: AclPreset) -> VnfConfig {
    match preset {
        AclPreset::PermitAll => VnfConfig::AclFw {
            rules: Vec::new(),
            default: AclAction::Permit,
        },
        AclPreset::DenyServicePorts => VnfConfig::AclFw {
            rules: vec![AclRule {
                matches: PacketClass::full().with_dst_port(IntervalSet::from_intervals([
                    (EMAIL_PORT, EMAIL_PORT),
                    (WEB_PORT, WEB_PORT),
                    (OTHER_PORT, OTHER_PORT),
                ])),
                action: AclAction::Deny,
            }],
            default: AclAction::Permit,
        },
    }
}

fn nat_config() -> VnfConfig {
    VnfConfig::Nat {
        internal_prefix: IntervalSet::range(INTERNAL_PREFIX.0, INTERNAL_PREFIX.1),
        public_ip: PUBLIC_IP,
    }
}

fn node(id: &str, config: VnfConfig, ports: &[&str]) -> VnfInstance {
    VnfInstance {
        id: NodeId::from(id),
        kind: config.kind(),
        config,
        ports: ports.iter().map(|p| PortId::from(*p)).collect(),
    }
}

fn link(from: (&str, &str), to: (&str, &str)) -> Link {
    Link {
        from: (NodeId::from(from.0), PortId::from(from.1)),
        to: (NodeId::from(to.0), PortId::from(to.1)),
    }
}

fn rule(priority: u32, matches: PacketClass, out_port: &str) -> Rule {
    Rule {
        priority,
        matches,
        out_port: PortId::from(out_port),
    }
}

fn app(c: AppClass) -> PacketClass {
    PacketClass::full().with_app_class(AppClassSet::single(c))
}

fn build(
    nodes: Vec<VnfInstance>,
    links: Vec<Link>,
    endpoints: Vec<(&str, EndpointRole)>,
    rules: Vec<(&str, Vec<Rule>)>,
) -> Nffg {
    let mut g = Nffg {
        nodes: nodes.into_iter().map(|n| (n.id.clone(), n)).collect(),
        links,
        endpoints: endpoints
            .into_iter()
            .map(|(id, r)| (NodeId::from(id), r))
            .collect(),
        rules: rules
            .into_iter()
            .map(|(id, rs)| (NodeId::from(id), rs))
            .collect(),
        version: 1,
    };
    g.normalize();
    debug_assert_eq!(g.validate(), Vec::new());
    g
}

/// Static gateway chain: three application classes branch at the client,
/// pass their class-specific function, then share NAT and firewall.
///
/// ```text
/// client ──EMAIL──> antispam ──┐
///        ──WEB────> webcache ──┼──> nat ──> acl ──EMAIL──> srv_email
///        ──OTHER──────────────-┘                 ──WEB────> srv_web
///                                                ──OTHER──> srv_other
/// ```
pub fn vcpe_static(preset: AclPreset) -> Nffg {
    build(
        vec![
            node("client", VnfConfig::Endpoint, &["to_email", "to_web", "to_other"]),
            node("antispam", VnfConfig::Antispam, &["in", "out"]),
            node("webcache", VnfConfig::WebCache, &["in", "out"]),
            node("nat", nat_config(), &["in_email", "in_web", "in_other", "out"]),
            node("acl", acl_config(preset), &["in", "email", "web", "other"]),
            node("srv_email", VnfConfig::Endpoint, &["in"]),
            node("srv_web", VnfConfig::Endpoint, &["in"]),
            node("srv_other", VnfConfig::Endpoint, &["in"]),
        ],
        vec![
            link(("client", "to_email"), ("antispam", "in")),
            link(("client", "to_web"), ("webcache", "in")),
            link(("client", "to_other"), ("nat", "in_other")),
            link(("antispam", "out"), ("nat", "in_email")),
            link(("webcache", "out"), ("nat", "in_web")),
            link(("nat", "out"), ("acl", "in")),
            link(("acl", "email"), ("srv_email", "in")),
            link(("acl", "web"), ("srv_web", "in")),
            link(("acl", "other"), ("srv_other", "in")),
        ],
        vec![
            ("client", EndpointRole::Client),
            ("srv_email", EndpointRole::Server),
            ("srv_web", EndpointRole::Server),
            ("srv_other", EndpointRole::Server),
        ],
        vec![
            (
                "client",
                vec![
                    rule(0, app(AppClass::Email), "to_email"),
                    rule(1, app(AppClass::Web), "to_web"),
                    rule(2, app(AppClass::Other), "to_other"),
                ],
            ),
            ("antispam", vec![rule(0, PacketClass::full(), "out")]),
            ("webcache", vec![rule(0, PacketClass::full(), "out")]),
            ("nat", vec![rule(0, PacketClass::full(), "out")]),
            (
                "acl",
                vec![
                    rule(0, app(AppClass::Email), "email"),
                    rule(1, app(AppClass::Web), "web"),
                    rule(2, app(AppClass::Other), "other"),
                ],
            ),
        ],
    )
}

pub fn fw_id(i: usize) -> NodeId {
    NodeId::new(format!("fw{i}"))
}

fn lb_port(i: usize) -> String {
    format!("b{i}")
}

fn fw_node(i: usize, preset: AclPreset) -> VnfInstance {
    VnfInstance {
        id: fw_id(i),
        kind: VnfKind::AclFw,
        config: acl_config(preset),
        ports: vec![PortId::from("in"), PortId::from("out")],
    }
}

fn lb_node(n: usize) -> VnfInstance {
    let mut ports = vec![PortId::from("in")];
    ports.extend((1..=n).map(|i| PortId::new(lb_port(i))));
    VnfInstance {
        id: NodeId::from("lb"),
        kind: VnfKind::LoadBalancer,
        config: VnfConfig::LoadBalancer {
            backends: (1..=n).map(fw_id).collect(),
        },
        ports,
    }
}

/// Source-bucket forwarding rules mirroring the balancer's behavioral
/// partition, one rule per backend.
fn lb_rules(n: usize) -> Vec<Rule> {
    partition_domain(n)
        .into_iter()
        .enumerate()
        .map(|(i, bucket)| {
            rule(
                i as u32,
                PacketClass::full().with_src_ip(bucket),
                &lb_port(i + 1),
            )
        })
        .collect()
}

/// Elastic gateway chain: like [`vcpe_static`] but with a load balancer
/// spreading all traffic across `n` parallel firewall instances before a
/// shared NAT, which then routes per application class to the servers.
///
/// ```text
/// client ──EMAIL──> antispam ──┐        ┌─> fw1 ─┐
///        ──WEB────> webcache ──┼──> lb ─┤  ...   ├─> nat ──> servers
///        ──OTHER──────────────-┘        └─> fwN ─┘
/// ```
///
/// The balancer sits before the NAT so source buckets still see distinct
/// client addresses.
pub fn vcpe_elastic(n: usize, preset: AclPreset) -> Nffg {
    assert!(n >= 1, "need at least one firewall instance");
    let mut nodes = vec![
        node("client", VnfConfig::Endpoint, &["to_email", "to_web", "to_other"]),
        node("antispam", VnfConfig::Antispam, &["in", "out"]),
        node("webcache", VnfConfig::WebCache, &["in", "out"]),
        lb_node(n),
        node("nat", nat_config(), &["in", "email", "web", "other"]),
        node("srv_email", VnfConfig::Endpoint, &["in"]),
        node("srv_web", VnfConfig::Endpoint, &["in"]),
        node("srv_other", VnfConfig::Endpoint, &["in"]),
    ];
    nodes.extend((1..=n).map(|i| fw_node(i, preset)));

    let mut links = vec![
        link(("client", "to_email"), ("antispam", "in")),
        link(("client", "to_web"), ("webcache", "in")),
        link(("client", "to_other"), ("lb", "in")),
        link(("antispam", "out"), ("lb", "in")),
        link(("webcache", "out"), ("lb", "in")),
        link(("nat", "email"), ("srv_email", "in")),
        link(("nat", "web"), ("srv_web", "in")),
        link(("nat", "other"), ("srv_other", "in")),
    ];
    for i in 1..=n {
        links.push(link(("lb", &lb_port(i)), (&format!("fw{i}"), "in")));
        links.push(link((&format!("fw{i}"), "out"), ("nat", "in")));
    }

    let mut rules = vec![
        (
            "client",
            vec![
                rule(0, app(AppClass::Email), "to_email"),
                rule(1, app(AppClass::Web), "to_web"),
                rule(2, app(AppClass::Other), "to_other"),
            ],
        ),
        ("antispam", vec![rule(0, PacketClass::full(), "out")]),
        ("webcache", vec![rule(0, PacketClass::full(), "out")]),
        (
            "nat",
            vec![
                rule(0, app(AppClass::Email), "email"),
                rule(1, app(AppClass::Web), "web"),
                rule(2, app(AppClass::Other), "other"),
            ],
        ),
        ("lb", lb_rules(n)),
    ];
    let fw_rule_sets: Vec<(String, Vec<Rule>)> = (1..=n)
        .map(|i| (format!("fw{i}"), vec![rule(0, PacketClass::full(), "out")]))
        .collect();
    // build() wants &str keys; collect owned names first, then borrow
    let mut g = build(nodes, links, vec![
        ("client", EndpointRole::Client),
        ("srv_email", EndpointRole::Server),
        ("srv_web", EndpointRole::Server),
        ("srv_other", EndpointRole::Server),
    ], Vec::new());
    for (id, rs) in rules.drain(..) {
        g.rules.insert(NodeId::from(id), rs);
    }
    for (id, rs) in fw_rule_sets {
        g.rules.insert(NodeId::new(id), rs);
    }
    g.normalize();
    debug_assert_eq!(g.validate(), Vec::new());
    g
}

/// Number of firewall instances currently deployed.
pub fn firewall_count(g: &Nffg) -> usize {
    g.nodes_of_kind(VnfKind::AclFw).count()
}

/// Builds the atomic update batch that rescales [`vcpe_elastic`] from its
/// current instance count to `target`. Because the balancer's backend list
/// is part of its node config, the batch replaces the `lb` node: unlink it,
/// remove it, re-add it with the new port/backend lists, then rewire and
/// retarget the bucket rules. Firewalls keep their ids 1..=target; new ones
/// clone the config of `fw1`.
pub fn elastic_scale_batch(g: &Nffg, target: usize) -> Vec<GraphUpdate> {
    assert!(target >= 1);
    let current = firewall_count(g);
    let lb = NodeId::from("lb");
    let fw1 = g.nodes[&fw_id(1)].clone();
    let mut ops = Vec::new();

    // unlink and drop the old balancer node
    for l in g.links.iter().filter(|l| l.from.0 == lb) {
        ops.push(GraphUpdate::RemoveLink {
            from: l.from.clone(),
        });
    }
    let in_links: Vec<Link> = g.links.iter().filter(|l| l.to.0 == lb).cloned().collect();
    for l in &in_links {
        ops.push(GraphUpdate::RemoveLink {
            from: l.from.clone(),
        });
    }
    ops.push(GraphUpdate::RemoveNode(lb.clone()));

    // drop surplus firewalls (scale-in)
    for i in (target + 1)..=current {
        ops.push(GraphUpdate::RemoveLink {
            from: (fw_id(i), PortId::from("out")),
        });
        ops.push(GraphUpdate::RemoveNode(fw_id(i)));
    }

    // add missing firewalls (scale-out)
    for i in (current + 1)..=target {
        let mut fw = fw_node(i, AclPreset::PermitAll);
        fw.config = fw1.config.clone();
        ops.push(GraphUpdate::AddNode(fw));
        ops.push(GraphUpdate::AddLink(link(
            (&format!("fw{i}"), "out"),
            ("nat", "in"),
        )));
        ops.push(GraphUpdate::SetRules {
            node: fw_id(i),
            rules: vec![rule(0, PacketClass::full(), "out")],
        });
    }

    // new balancer with the target-width fan-out
    ops.push(GraphUpdate::AddNode(lb_node(target)));
    for l in in_links {
        ops.push(GraphUpdate::AddLink(l));
    }
    for i in 1..=target {
        ops.push(GraphUpdate::AddLink(link(
            ("lb", &lb_port(i)),
            (&format!("fw{i}"), "in"),
        )));
    }
    ops.push(GraphUpdate::SetRules {
        node: lb,
        rules: lb_rules(target),
    });
    ops
}
