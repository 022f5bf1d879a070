// SPDX-License-Identifier: Apache-2.0

//! Behavioral models: what each function kind *does* to a symbolic packet
//! class. [`transfer`] maps an input class to a set of outcome branches —
//! forwarded (possibly rewritten), dropped, or answered locally — tagged
//! MUST (always happens) or MAY (can happen, e.g. a cache hit).
//!
//! Every outcome records both the sub-class of the input it consumed and
//! the class it produced; for passive kinds the two are equal, for
//! rewriting kinds (NAT, VPN) they differ. MUST-branch consumed classes
//! always partition the input.

use std::collections::BTreeMap;

use nffg_core::graph::{NodeId, PortId, VnfInstance};
use nffg_core::pc::{AppClass, AppClassSet, IntervalSet, PacketClass, SpamFlag, SpamFlagSet};
use nffg_core::vnf::{AclAction, VnfConfig};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Client towards server.
    ForwardPath,
    /// Server back towards client (exercises NAT/VPN reverse bindings).
    ReturnPath,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Disposition {
    /// Keep going. `Some(port)` when the function itself picks the output
    /// (load balancer); `None` defers to the node's forwarding rules.
    Forward(Option<PortId>),
    Drop,
    /// Terminated here with a locally generated answer (cache hit). The
    /// packet does not continue downstream.
    AnswerLocally,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BranchKind {
    Must,
    May,
}

/// One behavioral branch of a transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    /// Sub-class of the input that takes this branch (pre-rewrite).
    pub consumed: PacketClass,
    /// The class as it leaves the function (post-rewrite).
    pub klass: PacketClass,
    pub disposition: Disposition,
    pub branch: BranchKind,
}

impl Outcome {
    fn must(consumed: PacketClass, klass: PacketClass, disposition: Disposition) -> Self {
        Outcome {
            consumed,
            klass,
            disposition,
            branch: BranchKind::Must,
        }
    }

    fn passive(klass: PacketClass, disposition: Disposition) -> Self {
        Outcome::must(klass.clone(), klass, disposition)
    }
}

/// Verification-scoped rewrite state, reset per run. NAT entries accumulate
/// the union of translated source sets; VPN entries the encapsulated inner
/// classes.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct NatBindingTable {
    nat: BTreeMap<NodeId, IntervalSet>,
    vpn: BTreeMap<NodeId, Vec<PacketClass>>,
}

impl NatBindingTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn nat_bound(&self, node: &NodeId) -> Option<&IntervalSet> {
        self.nat.get(node)
    }

    fn record_nat(&mut self, node: &NodeId, srcs: &IntervalSet) {
        let entry = self.nat.entry(node.clone()).or_insert_with(IntervalSet::empty);
        *entry = entry.union(srcs);
    }

    fn record_vpn(&mut self, node: &NodeId, inner: PacketClass) {
        self.vpn.entry(node.clone()).or_default().push(inner);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TransferError {
    #[error("return traffic at {node} has no recorded binding")]
    UnknownBinding { node: NodeId },
    #[error("transfer requires a non-empty input class")]
    EmptyInput,
}

/// Swaps the two address fields and the two port fields; the class of the
/// replies to a request class.
pub fn swap_endpoints(pc: &PacketClass) -> PacketClass {
    PacketClass::new(
        pc.dst_ip.clone(),
        pc.src_ip.clone(),
        pc.dst_port.clone(),
        pc.src_port.clone(),
        pc.proto,
        pc.app_class,
        pc.spam_flag,
    )
}

/// Applies `inst`'s behavior to `input`.
///
/// `strict` controls return-path classes that reach a rewriting function
/// without a recorded binding: error when set, silent DROP otherwise.
pub fn transfer(
    inst: &VnfInstance,
    input: &PacketClass,
    dir: Direction,
    state: &mut NatBindingTable,
    strict: bool,
) -> Result<Vec<Outcome>, TransferError> {
    if input.is_empty() {
        return Err(TransferError::EmptyInput);
    }
    let fwd = Disposition::Forward(None);
    Ok(match &inst.config {
        VnfConfig::Endpoint => vec![Outcome::passive(input.clone(), fwd)],

        VnfConfig::Antispam => {
            let mut out = Vec::new();
            let spam = input.intersect(
                &PacketClass::full().with_spam_flag(SpamFlagSet::single(SpamFlag::Spam)),
            );
            if !spam.is_empty() {
                out.push(Outcome::passive(spam, Disposition::Drop));
            }
            let ham = input.intersect(
                &PacketClass::full().with_spam_flag(SpamFlagSet::single(SpamFlag::Ham)),
            );
            if !ham.is_empty() {
                out.push(Outcome::passive(ham, fwd));
            }
            out
        }

        VnfConfig::WebCache => {
            let mut out = Vec::new();
            let web = input
                .intersect(&PacketClass::full().with_app_class(AppClassSet::single(AppClass::Web)));
            if !web.is_empty() {
                // hit and miss are both possible on the whole web class
                out.push(Outcome {
                    consumed: web.clone(),
                    klass: web.clone(),
                    disposition: Disposition::AnswerLocally,
                    branch: BranchKind::May,
                });
                out.push(Outcome {
                    consumed: web.clone(),
                    klass: web,
                    disposition: fwd.clone(),
                    branch: BranchKind::May,
                });
            }
            for piece in input.subtract(
                &PacketClass::full().with_app_class(AppClassSet::single(AppClass::Web)),
            ) {
                out.push(Outcome::passive(piece, fwd.clone()));
            }
            out
        }

        VnfConfig::AclFw { rules, default } => {
            let mut out = Vec::new();
            let mut remaining = vec![input.clone()];
            for rule in rules {
                let mut next = Vec::new();
                for frag in &remaining {
                    let hit = frag.intersect(&rule.matches);
                    if !hit.is_empty() {
                        out.push(Outcome::passive(hit, action_disposition(rule.action)));
                    }
                    next.extend(frag.subtract(&rule.matches));
                }
                remaining = next;
                if remaining.is_empty() {
                    break;
                }
            }
            for frag in remaining {
                out.push(Outcome::passive(frag, action_disposition(*default)));
            }
            out
        }

        VnfConfig::Nat {
            internal_prefix,
            public_ip,
        } => match dir {
            Direction::ForwardPath => {
                let mut out = Vec::new();
                let inside = input.src_ip.intersect(internal_prefix);
                if !inside.is_empty() {
                    state.record_nat(&inst.id, &inside);
                    out.push(Outcome::must(
                        input.clone().with_src_ip(inside),
                        input.clone().with_src_ip(IntervalSet::single(*public_ip)),
                        fwd.clone(),
                    ));
                }
                let outside = input.src_ip.subtract(internal_prefix);
                if !outside.is_empty() {
                    // sources outside the translated prefix pass unchanged
                    out.push(Outcome::passive(input.clone().with_src_ip(outside), fwd));
                }
                out
            }
            Direction::ReturnPath => {
                let mut out = Vec::new();
                let to_public = input.dst_ip.intersect(&IntervalSet::single(*public_ip));
                if !to_public.is_empty() {
                    let consumed = input.clone().with_dst_ip(to_public);
                    match state.nat_bound(&inst.id) {
                        Some(bound) if !bound.is_empty() => {
                            let klass = input.clone().with_dst_ip(bound.clone());
                            out.push(Outcome::must(consumed, klass, fwd.clone()));
                        }
                        _ if strict => {
                            return Err(TransferError::UnknownBinding {
                                node: inst.id.clone(),
                            })
                        }
                        _ => out.push(Outcome::must(
                            consumed.clone(),
                            consumed,
                            Disposition::Drop,
                        )),
                    }
                }
                let elsewhere = input.dst_ip.subtract(&IntervalSet::single(*public_ip));
                if !elsewhere.is_empty() {
                    out.push(Outcome::passive(input.clone().with_dst_ip(elsewhere), fwd));
                }
                out
            }
        },

        VnfConfig::VpnGw {
            tunnel_src,
            tunnel_dst,
            inner_prefix,
        } => match dir {
            Direction::ForwardPath => {
                let mut out = Vec::new();
                let inside = input.src_ip.intersect(inner_prefix);
                if !inside.is_empty() {
                    let consumed = input.clone().with_src_ip(inside);
                    state.record_vpn(&inst.id, consumed.clone());
                    let klass = consumed
                        .clone()
                        .with_src_ip(IntervalSet::single(*tunnel_src))
                        .with_dst_ip(IntervalSet::single(*tunnel_dst));
                    out.push(Outcome::must(consumed, klass, fwd.clone()));
                }
                let outside = input.src_ip.subtract(inner_prefix);
                if !outside.is_empty() {
                    out.push(Outcome::passive(input.clone().with_src_ip(outside), fwd));
                }
                out
            }
            Direction::ReturnPath => {
                let mut out = Vec::new();
                let reply = input.intersect(
                    &PacketClass::full()
                        .with_src_ip(IntervalSet::single(*tunnel_dst))
                        .with_dst_ip(IntervalSet::single(*tunnel_src)),
                );
                if !reply.is_empty() {
                    let bindings = state.vpn.get(&inst.id).cloned().unwrap_or_default();
                    let mut decapped = 0usize;
                    for inner in bindings {
                        // decapsulation restores the (swapped) inner
                        // addresses; flag fields stay those of the reply
                        let restored = swap_endpoints(&inner)
                            .with_proto(reply.proto)
                            .with_app_class(reply.app_class)
                            .with_spam_flag(reply.spam_flag);
                        if restored.is_empty() {
                            continue;
                        }
                        decapped += 1;
                        out.push(Outcome {
                            consumed: reply.clone(),
                            klass: restored,
                            disposition: fwd.clone(),
                            branch: BranchKind::May,
                        });
                    }
                    if decapped == 0 {
                        if strict {
                            return Err(TransferError::UnknownBinding {
                                node: inst.id.clone(),
                            });
                        }
                        out.push(Outcome::must(reply.clone(), reply, Disposition::Drop));
                    }
                }
                for piece in input.subtract(
                    &PacketClass::full()
                        .with_src_ip(IntervalSet::single(*tunnel_dst))
                        .with_dst_ip(IntervalSet::single(*tunnel_src)),
                ) {
                    out.push(Outcome::passive(piece, fwd.clone()));
                }
                out
            }
        },

        VnfConfig::LoadBalancer { backends } => {
            let buckets = nffg_core::pc::partition_domain(backends.len());
            let mut out = Vec::new();
            for (i, bucket) in buckets.iter().enumerate() {
                let srcs = input.src_ip.intersect(bucket);
                if srcs.is_empty() {
                    continue;
                }
                let piece = input.clone().with_src_ip(srcs);
                // port layout: ports[0] is ingress, ports[i+1] feeds backends[i]
                let port = inst.ports[i + 1].clone();
                out.push(Outcome::must(
                    piece.clone(),
                    piece,
                    Disposition::Forward(Some(port)),
                ));
            }
            out
        }
    })
}

fn action_disposition(a: AclAction) -> Disposition {
    match a {
        AclAction::Permit => Disposition::Forward(None),
        AclAction::Deny => Disposition::Drop,
    }
}

/// Round-trips a class through a NAT: translate forward, synthesize the
/// reply class (endpoints swapped), translate back, swap again. For inputs
/// whose sources all lie inside the translated prefix the result equals the
/// input — translation is invisible to the two ends.
///
/// Precondition: `input.src_ip ⊆ internal_prefix` and input non-empty.
pub fn nat_roundtrip(config: &VnfConfig, input: &PacketClass) -> PacketClass {
    let VnfConfig::Nat { .. } = config else {
        panic!("nat_roundtrip needs a NAT config");
    };
    let inst = VnfInstance {
        id: NodeId::new("nat-roundtrip"),
        kind: nffg_core::vnf::VnfKind::Nat,
        config: config.clone(),
        ports: vec![PortId::new("in"), PortId::new("out")],
    };
    let mut state = NatBindingTable::new();
    let outward = transfer(&inst, input, Direction::ForwardPath, &mut state, true)
        .expect("forward translation cannot fail");
    assert_eq!(outward.len(), 1, "input must lie inside the prefix");
    let reply = swap_endpoints(&outward[0].klass);
    let inward = transfer(&inst, &reply, Direction::ReturnPath, &mut state, true)
        .expect("bound return translation cannot fail");
    assert_eq!(inward.len(), 1);
    swap_endpoints(&inward[0].klass)
}
