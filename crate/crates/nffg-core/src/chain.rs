// SPDX-License-Identifier: Apache-2.0

//! Chain extraction: partitions the traffic admitted at each client endpoint
//! into maximal classes that traverse a distinct node path, by following
//! forwarding rules only. Function behavior (drops, rewrites, cache answers)
//! is deliberately ignored — a chain says where a class is *routed*, the
//! verifier decides what survives.

use crate::graph::{Nffg, NodeId, VnfInstance};
use crate::pc::PacketClass;

/// An ordered node path plus the traffic class routed along it.
/// First node is a client endpoint, last is a server endpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    pub traffic_class: PacketClass,
    pub nodes: Vec<VnfInstance>,
}

impl Chain {
    pub fn node_ids(&self) -> Vec<&NodeId> {
        self.nodes.iter().map(|n| &n.id).collect()
    }

    pub fn client(&self) -> &NodeId {
        &self.nodes.first().expect("chain is never empty").id
    }

    pub fn server(&self) -> &NodeId {
        &self.nodes.last().expect("chain is never empty").id
    }

    /// Middle nodes: everything between the two endpoints.
    pub fn vnfs(&self) -> &[VnfInstance] {
        &self.nodes[1..self.nodes.len() - 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("forwarding rules revisit node {node} with an already-seen class")]
pub struct CyclicRouteError {
    pub node: NodeId,
}

// Branch depth guard; any sane desk-scale graph stays far below this.
const MAX_PATH_LEN: usize = 1000;

/// Splits `class` by the node's rules under first-match-wins semantics.
/// Returns (piece, out_port_index-into-rules) pairs; pieces are pairwise
/// disjoint, their union is the matched part of `class` (the unmatched
/// remainder is dropped by the forwarding layer).
fn first_match_pieces(g: &Nffg, node: &NodeId, class: &PacketClass) -> Vec<(PacketClass, usize)> {
    let rules = g.rules_of(node);
    let mut out = Vec::new();
    let mut remaining = vec![class.clone()];
    for (idx, rule) in rules.iter().enumerate() {
        let mut next_remaining = Vec::new();
        for frag in &remaining {
            let hit = frag.intersect(&rule.matches);
            if !hit.is_empty() {
                out.push((hit, idx));
            }
            next_remaining.extend(frag.subtract(&rule.matches));
        }
        remaining = next_remaining;
        if remaining.is_empty() {
            break;
        }
    }
    out
}

fn walk(
    g: &Nffg,
    node: &NodeId,
    class: PacketClass,
    path: &mut Vec<NodeId>,
    seen: &mut Vec<(NodeId, PacketClass)>,
    terminals: &mut Vec<(Vec<NodeId>, PacketClass)>,
) -> Result<(), CyclicRouteError> {
    if seen.iter().any(|(n, c)| n == node && *c == class) || path.len() > MAX_PATH_LEN {
        return Err(CyclicRouteError { node: node.clone() });
    }
    seen.push((node.clone(), class.clone()));
    path.push(node.clone());

    if g.endpoints.get(node).copied() == Some(crate::graph::EndpointRole::Server) {
        terminals.push((path.clone(), class));
    } else {
        for (piece, rule_idx) in first_match_pieces(g, node, &class) {
            let out_port = &g.rules_of(node)[rule_idx].out_port;
            // an unlinked out_port silently drops the piece, like no rule
            if let Some(link) = g.link_from(node, out_port) {
                walk(g, &link.to.0, piece, path, seen, terminals)?;
            }
        }
    }

    path.pop();
    seen.pop();
    Ok(())
}

/// Extracts every chain of `g`. Precondition: `g.validate()` is empty.
///
/// One chain per (client, server, maximal class on a distinct path): all
/// terminal classes sharing a node path are merged back into as few product
/// classes as possible. Output order is deterministic.
pub fn extract_chains(g: &Nffg) -> Result<Vec<Chain>, CyclicRouteError> {
    let mut terminals: Vec<(Vec<NodeId>, PacketClass)> = Vec::new();
    for client in g.client_endpoints() {
        let mut path = Vec::new();
        let mut seen = Vec::new();
        walk(
            g,
            client,
            PacketClass::full(),
            &mut path,
            &mut seen,
            &mut terminals,
        )?;
    }

    // group by path, then merge classes within each group to fixpoint
    let mut groups: std::collections::BTreeMap<Vec<NodeId>, Vec<PacketClass>> =
        std::collections::BTreeMap::new();
    for (path, class) in terminals {
        groups.entry(path).or_default().push(class);
    }

    let mut chains = Vec::new();
    for (path, mut classes) in groups {
        merge_to_fixpoint(&mut classes);
        classes.sort();
        for class in classes {
            chains.push(Chain {
                traffic_class: class,
                nodes: path
                    .iter()
                    .map(|id| g.nodes[id].clone())
                    .collect(),
            });
        }
    }
    Ok(chains)
}

/// Greedy pairwise merging until no two classes combine into one product.
fn merge_to_fixpoint(classes: &mut Vec<PacketClass>) {
    classes.sort();
    loop {
        let mut merged_any = false;
        'outer: for i in 0..classes.len() {
            for j in (i + 1)..classes.len() {
                if let Some(m) = classes[i].try_merge(&classes[j]) {
                    classes.swap_remove(j);
                    classes[i] = m;
                    merged_any = true;
                    break 'outer;
                }
            }
        }
        if !merged_any {
            break;
        }
        classes.sort();
    }
}
