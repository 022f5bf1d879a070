// SPDX-License-Identifier: Apache-2.0

//! Graph file format: a UTF-8 JSON document with top-level keys `nodes`,
//! `links`, `endpoints`, `rules`, `version`.
//!
//! ```json
//! {
//!   "nodes": [{"id": "nat0", "kind": "NAT",
//!              "config": {"internal_prefix": [[0, 4095]], "public_ip": 40000},
//!              "ports": ["in", "out"]}],
//!   "links": [{"from": ["client", "out"], "to": ["nat0", "in"]}],
//!   "endpoints": [{"id": "client", "role": "client"}],
//!   "rules": [{"node": "nat0", "priority": 0, "match": {}, "out_port": "out"}],
//!   "version": 1
//! }
//! ```
//!
//! A `match` object lists only restricted fields; an omitted field means the
//! full domain, so `{}` is the match-everything class. Interval fields are
//! arrays of `[lo, hi]` pairs (closed), flag fields are arrays of names.
//! Parsing then serializing then parsing again yields an equal graph.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::graph::{EndpointRole, Link, Nffg, NodeId, PortId, Rule, VnfInstance};
use crate::pc::PacketClass;
use crate::vnf::{VnfConfig, VnfKind};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("node {0} appears twice")]
    DuplicateNode(NodeId),
    #[error("endpoint {0} appears twice")]
    DuplicateEndpoint(NodeId),
    #[error("config of node {id} does not parse as {kind}: {source}")]
    BadConfig {
        id: NodeId,
        kind: VnfKind,
        source: serde_json::Error,
    },
}

#[derive(Serialize, Deserialize)]
struct NodeDoc {
    id: NodeId,
    kind: VnfKind,
    config: serde_json::Value,
    ports: Vec<PortId>,
}

#[derive(Serialize, Deserialize)]
struct LinkDoc {
    from: (NodeId, PortId),
    to: (NodeId, PortId),
}

#[derive(Serialize, Deserialize)]
struct EndpointDoc {
    id: NodeId,
    role: EndpointRole,
}

#[derive(Serialize, Deserialize)]
struct RuleDoc {
    node: NodeId,
    priority: u32,
    #[serde(rename = "match", default, skip_serializing_if = "PacketClass::is_full")]
    matches: PacketClass,
    out_port: PortId,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    nodes: Vec<NodeDoc>,
    links: Vec<LinkDoc>,
    endpoints: Vec<EndpointDoc>,
    rules: Vec<RuleDoc>,
    version: u64,
}

pub fn from_json_str(text: &str) -> Result<Nffg, IoError> {
    let doc: GraphDoc = serde_json::from_str(text)?;
    let mut nodes = BTreeMap::new();
    for n in doc.nodes {
        let config = VnfConfig::from_json(n.kind, n.config).map_err(|e| IoError::BadConfig {
            id: n.id.clone(),
            kind: n.kind,
            source: e,
        })?;
        let inst = VnfInstance {
            id: n.id.clone(),
            kind: n.kind,
            config,
            ports: n.ports,
        };
        if nodes.insert(n.id.clone(), inst).is_some() {
            return Err(IoError::DuplicateNode(n.id));
        }
    }
    let mut endpoints = BTreeMap::new();
    for e in doc.endpoints {
        if endpoints.insert(e.id.clone(), e.role).is_some() {
            return Err(IoError::DuplicateEndpoint(e.id));
        }
    }
    let mut rules: BTreeMap<NodeId, Vec<Rule>> = BTreeMap::new();
    for r in doc.rules {
        rules.entry(r.node).or_default().push(Rule {
            priority: r.priority,
            matches: r.matches,
            out_port: r.out_port,
        });
    }
    let mut g = Nffg {
        nodes,
        links: doc
            .links
            .into_iter()
            .map(|l| Link {
                from: l.from,
                to: l.to,
            })
            .collect(),
        endpoints,
        rules,
        version: doc.version,
    };
    g.normalize();
    Ok(g)
}

/// Serializes deterministically: nodes/endpoints by id, links sorted,
/// rules by (node, priority). Equal graphs produce identical bytes.
pub fn to_json_string(g: &Nffg) -> String {
    let doc = GraphDoc {
        nodes: g
            .nodes
            .values()
            .map(|n| NodeDoc {
                id: n.id.clone(),
                kind: n.kind,
                config: n.config.to_json(),
                ports: n.ports.clone(),
            })
            .collect(),
        links: {
            let mut links: Vec<&Link> = g.links.iter().collect();
            links.sort();
            links
                .into_iter()
                .map(|l| LinkDoc {
                    from: l.from.clone(),
                    to: l.to.clone(),
                })
                .collect()
        },
        endpoints: g
            .endpoints
            .iter()
            .map(|(id, role)| EndpointDoc {
                id: id.clone(),
                role: *role,
            })
            .collect(),
        rules: g
            .rules
            .iter()
            .flat_map(|(node, rules)| {
                rules.iter().map(move |r| RuleDoc {
                    node: node.clone(),
                    priority: r.priority,
                    matches: r.matches.clone(),
                    out_port: r.out_port.clone(),
                })
            })
            .collect(),
        version: g.version,
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("graph serialization is infallible");
    s.push('\n');
    s
}

pub fn load(path: impl AsRef<Path>) -> Result<Nffg, IoError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })?;
    from_json_str(&text)
}

pub fn save(g: &Nffg, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    std::fs::write(path, to_json_string(g)).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}
