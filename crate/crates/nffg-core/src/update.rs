// SPDX-License-Identifier: Apache-2.0

//! Atomic graph updates with persistent semantics: the input graph is never
//! mutated; a successful update returns a fresh graph with `version + 1`,
//! a rejected update returns the first violation it would introduce.

use serde::{Deserialize, Serialize};

use crate::graph::{Link, Nffg, NodeId, PortId, Rule, Violation, VnfInstance};

#[derive(Clone, Debug)]
pub enum GraphUpdate {
    AddNode(VnfInstance),
    RemoveNode(NodeId),
    AddLink(Link),
    RemoveLink { from: (NodeId, PortId) },
    SetRules { node: NodeId, rules: Vec<Rule> },
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error, Serialize, Deserialize)]
pub enum RejectedUpdate {
    #[error("node {0} already exists")]
    NodeExists(NodeId),
    #[error("node {0} does not exist")]
    NoSuchNode(NodeId),
    #[error("node {0} is still referenced by a link")]
    NodeInUse(NodeId),
    #[error("a link already leaves ({0}, {1})")]
    LinkExists(NodeId, PortId),
    #[error("no link leaves ({0}, {1})")]
    NoSuchLink(NodeId, PortId),
    #[error("update would invalidate the graph: {0}")]
    WouldViolate(String),
}

impl From<Violation> for RejectedUpdate {
    fn from(v: Violation) -> Self {
        RejectedUpdate::WouldViolate(v.to_string())
    }
}

/// Applies one structural edit without validating the result. Used by both
/// the single-op and batch entry points.
fn apply_op(g: &mut Nffg, u: &GraphUpdate) -> Result<(), RejectedUpdate> {
    match u {
        GraphUpdate::AddNode(inst) => {
            if g.nodes.contains_key(&inst.id) {
                return Err(RejectedUpdate::NodeExists(inst.id.clone()));
            }
            g.nodes.insert(inst.id.clone(), inst.clone());
        }
        GraphUpdate::RemoveNode(id) => {
            if !g.nodes.contains_key(id) {
                return Err(RejectedUpdate::NoSuchNode(id.clone()));
            }
            if g.links.iter().any(|l| &l.from.0 == id || &l.to.0 == id) {
                return Err(RejectedUpdate::NodeInUse(id.clone()));
            }
            g.nodes.remove(id);
            g.rules.remove(id);
            g.endpoints.remove(id);
        }
        GraphUpdate::AddLink(link) => {
            if g.link_from(&link.from.0, &link.from.1).is_some() {
                return Err(RejectedUpdate::LinkExists(
                    link.from.0.clone(),
                    link.from.1.clone(),
                ));
            }
            g.links.push(link.clone());
        }
        GraphUpdate::RemoveLink { from } => {
            let before = g.links.len();
            g.links.retain(|l| l.from != *from);
            if g.links.len() == before {
                return Err(RejectedUpdate::NoSuchLink(from.0.clone(), from.1.clone()));
            }
        }
        GraphUpdate::SetRules { node, rules } => {
            if !g.nodes.contains_key(node) {
                return Err(RejectedUpdate::NoSuchNode(node.clone()));
            }
            if rules.is_empty() {
                g.rules.remove(node);
            } else {
                g.rules.insert(node.clone(), rules.clone());
            }
        }
    }
    Ok(())
}

/// Applies a single update. The result is validated; the first violation
/// rejects the whole update and `g` is returned untouched by construction
/// (we only ever mutate a clone).
pub fn apply_update(g: &Nffg, u: &GraphUpdate) -> Result<Nffg, RejectedUpdate> {
    apply_batch(g, std::slice::from_ref(u))
}

/// Applies a sequence of updates as one atomic transaction: intermediate
/// states may be invalid (a new node is linked only by a later op), the
/// final state must validate. One version bump for the whole batch.
pub fn apply_batch(g: &Nffg, updates: &[GraphUpdate]) -> Result<Nffg, RejectedUpdate> {
    let mut next = g.clone();
    for u in updates {
        apply_op(&mut next, u)?;
    }
    next.normalize();
    if let Some(v) = next.validate().into_iter().next() {
        return Err(v.into());
    }
    next.version = g.version + 1;
    Ok(next)
}
