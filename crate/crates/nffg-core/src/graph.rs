// SPDX-License-Identifier: Apache-2.0

//! The forwarding graph: typed nodes, directed port-to-port links,
//! per-node priority-ordered forwarding rules, and structural validation.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pc::PacketClass;
use crate::vnf::{VnfConfig, VnfKind};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PortId(pub String);

impl NodeId {
    pub fn new(s: impl Into<String>) -> Self {
        NodeId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl PortId {
    pub fn new(s: impl Into<String>) -> Self {
        PortId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

macro_rules! fmt_id {
    () => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            f.write_str(&self.0)
        }
    };
}

impl fmt::Display for NodeId {
    fmt_id!();
}

impl fmt::Display for PortId {
    fmt_id!();
}

impl fmt::Debug for NodeId {
    fmt_id!();
}

impl fmt::Debug for PortId {
    fmt_id!();
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<&str> for PortId {
    fn from(s: &str) -> Self {
        PortId(s.to_owned())
    }
}

/// One placed function instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VnfInstance {
    pub id: NodeId,
    pub kind: VnfKind,
    pub config: VnfConfig,
    /// Ordered; load balancers use position (port 0 = ingress, port i+1 =
    /// backend i), all other kinds treat ports as opaque names.
    pub ports: Vec<PortId>,
}

impl VnfInstance {
    pub fn has_port(&self, p: &PortId) -> bool {
        self.ports.contains(p)
    }
}

/// Directed edge between two (node, port) attachment points.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    pub from: (NodeId, PortId),
    pub to: (NodeId, PortId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EndpointRole {
    Client,
    Server,
}

/// One forwarding entry; lower `priority` value wins, first match applies.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub priority: u32,
    pub matches: PacketClass,
    pub out_port: PortId,
}

/// A versioned forwarding graph. Values are immutable after construction;
/// updates produce new graphs (see `update`).
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Nffg {
    pub nodes: BTreeMap<NodeId, VnfInstance>,
    pub links: Vec<Link>,
    pub endpoints: BTreeMap<NodeId, EndpointRole>,
    /// Per-node rule lists, each sorted by ascending priority.
    pub rules: BTreeMap<NodeId, Vec<Rule>>,
    pub version: u64,
}

/// A structural defect found by [`Nffg::validate`]. Violations are data:
/// an invalid graph is representable, it just fails validation.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("link references unknown node {0}")]
    LinkUnknownNode(NodeId),
    #[error("link references unknown port {0} on node {1}")]
    LinkUnknownPort(PortId, NodeId),
    #[error("two links leave the same attachment point ({0}, {1})")]
    DuplicateLinkSource(NodeId, PortId),
    #[error("rule list references unknown node {0}")]
    RuleUnknownNode(NodeId),
    #[error("rule (priority {1}) on node {0} references unknown port {2}")]
    RuleUnknownPort(NodeId, u32, PortId),
    #[error("node {0} has two rules with priority {1}")]
    DuplicateRulePriority(NodeId, u32),
    #[error("endpoint entry references unknown node {0}")]
    EndpointUnknownNode(NodeId),
    #[error("endpoint entry on {0} but node kind is {1}, not ENDPOINT")]
    EndpointWrongKind(NodeId, VnfKind),
    #[error("node {0} has kind ENDPOINT but no client/server role")]
    EndpointMissingRole(NodeId),
    #[error("node {0} declares kind {1} but its config is for {2}")]
    KindConfigMismatch(NodeId, VnfKind, VnfKind),
    #[error("NAT {0} has an empty internal prefix")]
    NatEmptyPrefix(NodeId),
    #[error("load balancer {0}: backend list and ports disagree ({1})")]
    LbWiring(NodeId, String),
    #[error("client endpoint {0} cannot reach any server endpoint")]
    ClientDisconnected(NodeId),
    #[error("duplicate port {1} on node {0}")]
    DuplicatePort(NodeId, PortId),
}

impl Nffg {
    pub fn instance(&self, id: &NodeId) -> Option<&VnfInstance> {
        self.nodes.get(id)
    }

    /// The unique link leaving `(node, port)`, if any.
    pub fn link_from(&self, node: &NodeId, port: &PortId) -> Option<&Link> {
        self.links
            .iter()
            .find(|l| &l.from.0 == node && &l.from.1 == port)
    }

    /// Rules of `node`, already priority-sorted. Empty slice when none.
    pub fn rules_of(&self, node: &NodeId) -> &[Rule] {
        self.rules.get(node).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn client_endpoints(&self) -> impl Iterator<Item = &NodeId> {
        self.endpoints
            .iter()
            .filter(|(_, r)| **r == EndpointRole::Client)
            .map(|(id, _)| id)
    }

    pub fn server_endpoints(&self) -> impl Iterator<Item = &NodeId> {
        self.endpoints
            .iter()
            .filter(|(_, r)| **r == EndpointRole::Server)
            .map(|(id, _)| id)
    }

    pub fn nodes_of_kind(&self, kind: VnfKind) -> impl Iterator<Item = &VnfInstance> {
        self.nodes.values().filter(move |n| n.kind == kind)
    }

    /// Re-sorts every rule list by priority. Constructors and the loader
    /// call this so `rules_of` can rely on the ordering.
    pub fn normalize(&mut self) {
        for rules in self.rules.values_mut() {
            rules.sort_by_key(|r| r.priority);
        }
        self.links.sort();
    }

    /// Checks every structural invariant; the returned list is empty iff
    /// the graph is valid. Order is deterministic.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();

        for node in self.nodes.values() {
            let mut seen = BTreeSet::new();
            for p in &node.ports {
                if !seen.insert(p) {
                    out.push(Violation::DuplicatePort(node.id.clone(), p.clone()));
                }
            }
            if node.config.kind() != node.kind {
                out.push(Violation::KindConfigMismatch(
                    node.id.clone(),
                    node.kind,
                    node.config.kind(),
                ));
            }
            match &node.config {
                VnfConfig::Nat {
                    internal_prefix, ..
                } if internal_prefix.is_empty() => {
                    out.push(Violation::NatEmptyPrefix(node.id.clone()));
                }
                VnfConfig::LoadBalancer { backends } => {
                    self.check_lb_wiring(node, backends, &mut out);
                }
                _ => {}
            }
            if node.kind == VnfKind::Endpoint && !self.endpoints.contains_key(&node.id) {
                out.push(Violation::EndpointMissingRole(node.id.clone()));
            }
        }

        let mut link_sources = BTreeSet::new();
        for link in &self.links {
            for (node, port) in [&link.from, &link.to] {
                match self.nodes.get(node) {
                    None => out.push(Violation::LinkUnknownNode(node.clone())),
                    Some(n) if !n.has_port(port) => {
                        out.push(Violation::LinkUnknownPort(port.clone(), node.clone()))
                    }
                    Some(_) => {}
                }
            }
            if !link_sources.insert(link.from.clone()) {
                out.push(Violation::DuplicateLinkSource(
                    link.from.0.clone(),
                    link.from.1.clone(),
                ));
            }
        }

        for (node, rules) in &self.rules {
            let Some(inst) = self.nodes.get(node) else {
                out.push(Violation::RuleUnknownNode(node.clone()));
                continue;
            };
            let mut prios = BTreeSet::new();
            for rule in rules {
                if !prios.insert(rule.priority) {
                    out.push(Violation::DuplicateRulePriority(node.clone(), rule.priority));
                }
                if !inst.has_port(&rule.out_port) {
                    out.push(Violation::RuleUnknownPort(
                        node.clone(),
                        rule.priority,
                        rule.out_port.clone(),
                    ));
                }
            }
        }

        for node in self.endpoints.keys() {
            match self.nodes.get(node) {
                None => out.push(Violation::EndpointUnknownNode(node.clone())),
                Some(n) if n.kind != VnfKind::Endpoint => {
                    out.push(Violation::EndpointWrongKind(node.clone(), n.kind))
                }
                Some(_) => {}
            }
        }

        // Connectivity is only meaningful once references resolve.
        if out.is_empty() {
            let servers: BTreeSet<&NodeId> = self.server_endpoints().collect();
            for client in self.client_endpoints() {
                if !self.reaches_any(client, &servers) {
                    out.push(Violation::ClientDisconnected(client.clone()));
                }
            }
        }

        out
    }

    fn check_lb_wiring(&self, node: &VnfInstance, backends: &[NodeId], out: &mut Vec<Violation>) {
        if node.ports.len() != backends.len() + 1 {
            out.push(Violation::LbWiring(
                node.id.clone(),
                format!(
                    "{} backends need {} ports, node has {}",
                    backends.len(),
                    backends.len() + 1,
                    node.ports.len()
                ),
            ));
            return;
        }
        for (i, backend) in backends.iter().enumerate() {
            if !self.nodes.contains_key(backend) {
                out.push(Violation::LbWiring(
                    node.id.clone(),
                    format!("backend {backend} does not exist"),
                ));
                continue;
            }
            let port = &node.ports[i + 1];
            match self.link_from(&node.id, port) {
                Some(link) if &link.to.0 == backend => {}
                Some(link) => out.push(Violation::LbWiring(
                    node.id.clone(),
                    format!("port {port} is wired to {}, expected backend {backend}", link.to.0),
                )),
                None => out.push(Violation::LbWiring(
                    node.id.clone(),
                    format!("port {port} has no link to backend {backend}"),
                )),
            }
        }
    }

    /// Link-level BFS from `start`; rules are deliberately ignored here —
    /// connectivity is a wiring property, reachability is the verifier's job.
    fn reaches_any(&self, start: &NodeId, targets: &BTreeSet<&NodeId>) -> bool {
        let mut seen = BTreeSet::new();
        let mut q = VecDeque::new();
        seen.insert(start.clone());
        q.push_back(start.clone());
        while let Some(n) = q.pop_front() {
            if targets.contains(&n) {
                return true;
            }
            for link in self.links.iter().filter(|l| l.from.0 == n) {
                if seen.insert(link.to.0.clone()) {
                    q.push_back(link.to.0.clone());
                }
            }
        }
        false
    }
}
