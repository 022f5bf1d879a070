// SPDX-License-Identifier: Apache-2.0

//! Policies and verdicts. A policy file is a JSON array of
//! `{kind, from, to, traffic}` objects; `traffic` uses the same shape as a
//! forwarding-rule match (omitted field = full domain).

use nffg_core::graph::NodeId;
use nffg_core::pc::{ConcretePacket, PacketClass};
use nffg_core::vnf::VnfKind;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PolicyKind {
    #[serde(rename = "REACHABILITY")]
    Reachability,
    #[serde(rename = "ISOLATION")]
    Isolation,
}

impl std::fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PolicyKind::Reachability => write!(f, "REACHABILITY"),
            PolicyKind::Isolation => write!(f, "ISOLATION"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Policy {
    pub kind: PolicyKind,
    pub from: NodeId,
    pub to: NodeId,
    #[serde(default, skip_serializing_if = "PacketClass::is_full")]
    pub traffic: PacketClass,
}

/// Proof of reachability: a concrete ingress packet and the node path it
/// takes. The packet is stated pre-rewrite (as the client would send it).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub packet: ConcretePacket,
    pub path: Vec<NodeId>,
}

/// Root cause of a holding isolation: the first node along the chain at
/// which the propagated class dies on all branches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cause {
    pub node: NodeId,
    pub kind: VnfKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub cause: Option<Cause>,
    /// Wall-clock cost of this check. Excluded from serialized reports so
    /// verdict documents stay byte-deterministic; timings go to the CSV.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum VerifyError {
    #[error("no chain connects {from} to {to}")]
    NoChain { from: NodeId, to: NodeId },
    #[error("policy endpoint {0} does not exist or has the wrong role")]
    UnknownEndpoint(NodeId),
    #[error("policy traffic class is empty")]
    EmptyTraffic,
    #[error("root-cause analysis requires a holding isolation")]
    NotIsolated,
    #[error("graph is invalid: {0}")]
    InvalidGraph(String),
    #[error("route extraction failed: {0}")]
    Cyclic(String),
}

pub fn policies_from_json(text: &str) -> Result<Vec<Policy>, serde_json::Error> {
    serde_json::from_str(text)
}

pub fn policies_to_json(ps: &[Policy]) -> String {
    let mut s = serde_json::to_string_pretty(ps).expect("policy serialization is infallible");
    s.push('\n');
    s
}
