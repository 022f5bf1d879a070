// SPDX-License-Identifier: Apache-2.0

//! Brute-force reachability oracle: enumerate every concrete packet of a
//! reduced header domain and push each one through the graph hop by hop,
//! forking on nondeterministic branches. Deliberately shares nothing with
//! the symbolic engine — packet membership and per-kind behavior are
//! re-implemented here on plain values, so the two sides can only agree by
//! computing the same semantics.

use nffg_core::graph::{EndpointRole, Nffg, NodeId, VnfInstance};
use nffg_core::pc::{AppClass, ConcretePacket, IntervalSet, PacketClass, Proto, SpamFlag};
use nffg_core::vnf::{AclAction, VnfConfig};

use crate::policy::Policy;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("domain of {0} bits is too large to enumerate (max 8)")]
    DomainTooLarge(u8),
}

/// Where a concrete packet ended up.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    /// Reached a server endpoint.
    Arrived(NodeId),
    /// Discarded by a function (firewall deny, spam filter).
    Dropped(NodeId),
    /// Served locally by a cache hit; never reached a server.
    Answered(NodeId),
    /// No forwarding rule or link applied.
    Stuck(NodeId),
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub path: Vec<NodeId>,
    /// The packet as it looked when the trace ended (post-rewrites).
    pub packet: ConcretePacket,
    pub terminal: Terminal,
}

fn in_interval_set(s: &IntervalSet, v: u32) -> bool {
    s.intervals().iter().any(|&(lo, hi)| lo <= v && v <= hi)
}

/// Local membership test: field-by-field scan over the class representation.
pub fn class_contains(c: &PacketClass, q: &ConcretePacket) -> bool {
    in_interval_set(&c.src_ip, q.src_ip)
        && in_interval_set(&c.dst_ip, q.dst_ip)
        && in_interval_set(&c.src_port, q.src_port)
        && in_interval_set(&c.dst_port, q.dst_port)
        && c.proto.iter().any(|v| v == q.proto)
        && c.app_class.iter().any(|v| v == q.app_class)
        && c.spam_flag.iter().any(|v| v == q.spam_flag)
}

/// All concrete packets of the reduced domain: `domain_bits` total bits are
/// dealt round-robin to src_ip, dst_ip, src_port, dst_port; the three flag
/// fields always enumerate fully. 8 bits = 2 per field = 3072 packets.
pub fn domain_packets(domain_bits: u8) -> Result<Vec<ConcretePacket>, OracleError> {
    if domain_bits > 8 {
        return Err(OracleError::DomainTooLarge(domain_bits));
    }
    let mut bits = [0u32; 4];
    for i in 0..domain_bits as usize {
        bits[i % 4] += 1;
    }
    let lim = |b: u32| 1u32 << b;
    let mut out = Vec::new();
    for src_ip in 0..lim(bits[0]) {
        for dst_ip in 0..lim(bits[1]) {
            for src_port in 0..lim(bits[2]) {
                for dst_port in 0..lim(bits[3]) {
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
    Ok(out)
}

enum Behavior {
    Pass(ConcretePacket),
    Kill,
    /// Cache: the packet may be answered here or pass through.
    MaybeAnswer(ConcretePacket),
    /// Balancer: forward through this port, bypassing rules.
    UsePort(usize, ConcretePacket),
}

fn behave(node: &VnfInstance, q: ConcretePacket) -> Behavior {
    match &node.config {
        VnfConfig::Endpoint => Behavior::Pass(q),
        VnfConfig::Antispam => {
            if q.spam_flag == SpamFlag::Spam {
                Behavior::Kill
            } else {
                Behavior::Pass(q)
            }
        }
        VnfConfig::WebCache => {
            if q.app_class == AppClass::Web {
                Behavior::MaybeAnswer(q)
            } else {
                Behavior::Pass(q)
            }
        }
        VnfConfig::AclFw { rules, default } => {
            let action = rules
                .iter()
                .find(|r| class_contains(&r.matches, &q))
                .map(|r| r.action)
                .unwrap_or(*default);
            match action {
                AclAction::Permit => Behavior::Pass(q),
                AclAction::Deny => Behavior::Kill,
            }
        }
        VnfConfig::Nat {
            internal_prefix,
            public_ip,
        } => {
            let mut q = q;
            if in_interval_set(internal_prefix, q.src_ip) {
                q.src_ip = *public_ip;
            }
            Behavior::Pass(q)
        }
        VnfConfig::VpnGw {
            tunnel_src,
            tunnel_dst,
            inner_prefix,
        } => {
            let mut q = q;
            if in_interval_set(inner_prefix, q.src_ip) {
                q.src_ip = *tunnel_src;
                q.dst_ip = *tunnel_dst;
            }
            Behavior::Pass(q)
        }
        VnfConfig::LoadBalancer { backends } => {
            let n = backends.len() as u64;
            let bucket = (q.src_ip as u64) * n / 65536;
            Behavior::UsePort(bucket as usize + 1, q)
        }
    }
}

const HOP_LIMIT: usize = 64;

/// Forward-path concrete simulation of one packet from `start`, exploring
/// both sides of every nondeterministic branch. Returns every distinct
/// completion.
pub fn trace_packet(g: &Nffg, start: &NodeId, packet: ConcretePacket) -> Vec<Trace> {
    let mut done = Vec::new();
    let mut stack = vec![(start.clone(), packet, vec![start.clone()])];
    while let Some((at, q, path)) = stack.pop() {
        if path.len() > HOP_LIMIT {
            done.push(Trace {
                path,
                packet: q,
                terminal: Terminal::Stuck(at),
            });
            continue;
        }
        if g.endpoints.get(&at) == Some(&EndpointRole::Server) {
            done.push(Trace {
                path,
                packet: q,
                terminal: Terminal::Arrived(at),
            });
            continue;
        }
        let node = &g.nodes[&at];
        let (q, forced_port) = match behave(node, q) {
            Behavior::Kill => {
                done.push(Trace {
                    path,
                    packet: q,
                    terminal: Terminal::Dropped(at),
                });
                continue;
            }
            Behavior::MaybeAnswer(q) => {
                done.push(Trace {
                    path: path.clone(),
                    packet: q,
                    terminal: Terminal::Answered(at.clone()),
                });
                (q, None) // ... and also continue as a miss
            }
            Behavior::Pass(q) => (q, None),
            Behavior::UsePort(idx, q) => (q, Some(idx)),
        };
        let out_port = match forced_port {
            Some(idx) => node.ports.get(idx).cloned(),
            None => g
                .rules_of(&at)
                .iter()
                .find(|r| class_contains(&r.matches, &q))
                .map(|r| r.out_port.clone()),
        };
        let Some(port) = out_port else {
            done.push(Trace {
                path,
                packet: q,
                terminal: Terminal::Stuck(at),
            });
            continue;
        };
        let Some(link) = g.link_from(&at, &port) else {
            done.push(Trace {
                path,
                packet: q,
                terminal: Terminal::Stuck(at),
            });
            continue;
        };
        let mut next_path = path;
        next_path.push(link.to.0.clone());
        stack.push((link.to.0.clone(), q, next_path));
    }
    done
}

/// True iff some enumerated packet of `p.traffic` can arrive at `p.to`
/// under some resolution of the nondeterministic branches.
pub fn oracle_reachability(g: &Nffg, p: &Policy, domain_bits: u8) -> Result<bool, OracleError> {
    for q in domain_packets(domain_bits)? {
        if !class_contains(&p.traffic, &q) {
            continue;
        }
        for trace in trace_packet(g, &p.from, q) {
            if trace.terminal == Terminal::Arrived(p.to.clone()) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
