// SPDX-License-Identifier: Apache-2.0

//! The symbolic verification engine: propagates a policy's traffic class
//! along every extracted chain between its endpoints, taking the union over
//! MAY branches. Reachability holds iff the class arriving at the server is
//! non-empty; isolation is the exact complement. Root cause of a holding
//! isolation is found by iterated prefix reachability: re-propagate over
//! growing chain prefixes until the surviving class first comes out empty.

use std::time::Instant;

use nffg_core::chain::{extract_chains, Chain};
use nffg_core::graph::{EndpointRole, Nffg, VnfInstance};
use nffg_core::pc::{ConcretePacket, PacketClass};
use serde::{Deserialize, Serialize};
use vnf_models::{transfer, Direction, Disposition, NatBindingTable};

use crate::policy::{Cause, Policy, PolicyKind, Verdict, VerifyError, Witness};

/// One propagation step a surviving branch took: the node it passed and the
/// pre-rewrite sub-class it consumed there. Enough to pull a concrete
/// arrival packet back to the ingress packet that produced it.
#[derive(Clone, Debug)]
struct Step {
    consumed: PacketClass,
}

#[derive(Clone, Debug)]
struct Branch {
    class: PacketClass,
    steps: Vec<Step>,
    bindings: NatBindingTable,
}

/// Propagates `seed` along `nodes`, applying each node's behavior and then
/// its forwarding rules, keeping only branches that stay on the given path.
/// Returns the branches *entering* the final node.
fn propagate(g: &Nffg, nodes: &[VnfInstance], seed: &PacketClass) -> Vec<Branch> {
    let mut branches = vec![Branch {
        class: seed.clone(),
        steps: Vec::new(),
        bindings: NatBindingTable::new(),
    }];
    for window in nodes.windows(2) {
        let (node, next) = (&window[0], &window[1]);
        let mut survivors = Vec::new();
        for mut branch in branches {
            let outcomes = match transfer(
                node,
                &branch.class,
                Direction::ForwardPath,
                &mut branch.bindings,
                false,
            ) {
                Ok(o) => o,
                Err(_) => continue, // empty input cannot happen; defensive
            };
            for outcome in outcomes {
                let Disposition::Forward(chosen) = &outcome.disposition else {
                    continue; // DROP and ANSWER_LOCALLY end the branch
                };
                match chosen {
                    // the function picked the port itself (load balancer)
                    Some(port) => {
                        if let Some(link) = g.link_from(&node.id, port) {
                            if link.to.0 == next.id {
                                survivors.push(branch.extended(&outcome.consumed, outcome.klass.clone()));
                            }
                        }
                    }
                    // defer to the node's forwarding rules
                    None => {
                        for (piece, out_port) in route(g, node, &outcome.klass) {
                            if let Some(link) = g.link_from(&node.id, &out_port) {
                                if link.to.0 == next.id {
                                    survivors.push(branch.extended(&outcome.consumed, piece));
                                }
                            }
                        }
                    }
                }
            }
        }
        branches = survivors;
        if branches.is_empty() {
            break;
        }
    }
    branches
}

impl Branch {
    fn extended(&self, consumed: &PacketClass, class: PacketClass) -> Branch {
        let mut steps = self.steps.clone();
        steps.push(Step {
            consumed: consumed.clone(),
        });
        Branch {
            class,
            steps,
            bindings: self.bindings.clone(),
        }
    }
}

/// First-match split of `class` over the node's forwarding rules.
fn route(g: &Nffg, node: &VnfInstance, class: &PacketClass) -> Vec<(PacketClass, nffg_core::graph::PortId)> {
    let mut out = Vec::new();
    let mut remaining = vec![class.clone()];
    for rule in g.rules_of(&node.id) {
        let mut next = Vec::new();
        for frag in &remaining {
            let hit = frag.intersect(&rule.matches);
            if !hit.is_empty() {
                out.push((hit, rule.out_port.clone()));
            }
            next.extend(frag.subtract(&rule.matches));
        }
        remaining = next;
        if remaining.is_empty() {
            break;
        }
    }
    out
}

/// Reconstructs an ingress packet from an arrival packet by walking the
/// branch's consumed classes backwards. Per field: keep the value when the
/// earlier class already contains it (the function passed it through),
/// otherwise take any value of the earlier class (the function rewrote it).
fn pull_back(arrival: ConcretePacket, steps: &[Step]) -> ConcretePacket {
    let mut q = arrival;
    for step in steps.iter().rev() {
        let c = &step.consumed;
        q = ConcretePacket {
            src_ip: pick(q.src_ip, c.src_ip.contains(q.src_ip), || c.src_ip.min_value().unwrap()),
            dst_ip: pick(q.dst_ip, c.dst_ip.contains(q.dst_ip), || c.dst_ip.min_value().unwrap()),
            src_port: pick(q.src_port, c.src_port.contains(q.src_port), || {
                c.src_port.min_value().unwrap()
            }),
            dst_port: pick(q.dst_port, c.dst_port.contains(q.dst_port), || {
                c.dst_port.min_value().unwrap()
            }),
            proto: if c.proto.contains(q.proto) {
                q.proto
            } else {
                c.proto.min_value().unwrap()
            },
            app_class: if c.app_class.contains(q.app_class) {
                q.app_class
            } else {
                c.app_class.min_value().unwrap()
            },
            spam_flag: if c.spam_flag.contains(q.spam_flag) {
                q.spam_flag
            } else {
                c.spam_flag.min_value().unwrap()
            },
        };
    }
    q
}

fn pick(v: u32, keep: bool, fallback: impl FnOnce() -> u32) -> u32 {
    if keep {
        v
    } else {
        fallback()
    }
}

fn checked_chains(g: &Nffg, p: &Policy) -> Result<Vec<Chain>, VerifyError> {
    if p.traffic.is_empty() {
        return Err(VerifyError::EmptyTraffic);
    }
    if g.endpoints.get(&p.from) != Some(&EndpointRole::Client) {
        return Err(VerifyError::UnknownEndpoint(p.from.clone()));
    }
    if g.endpoints.get(&p.to) != Some(&EndpointRole::Server) {
        return Err(VerifyError::UnknownEndpoint(p.to.clone()));
    }
    if let Some(v) = g.validate().into_iter().next() {
        return Err(VerifyError::InvalidGraph(v.to_string()));
    }
    let chains: Vec<Chain> = extract_chains(g)
        .map_err(|e| VerifyError::Cyclic(e.to_string()))?
        .into_iter()
        .filter(|c| c.client() == &p.from && c.server() == &p.to)
        .collect();
    if chains.is_empty() {
        return Err(VerifyError::NoChain {
            from: p.from.clone(),
            to: p.to.clone(),
        });
    }
    Ok(chains)
}

/// Does any concrete packet of `p.traffic`, under some resolution of MAY
/// branches, arrive at `p.to`? Holding verdicts carry a replayable witness.
pub fn check_reachability(g: &Nffg, p: &Policy) -> Result<Verdict, VerifyError> {
    let started = Instant::now();
    let chains = checked_chains(g, p)?;
    let mut witness = None;
    for chain in &chains {
        let seed = p.traffic.intersect(&chain.traffic_class);
        if seed.is_empty() {
            continue;
        }
        for branch in propagate(g, &chain.nodes, &seed) {
            if branch.class.is_empty() {
                continue;
            }
            let arrival = branch.class.sample().expect("non-empty class samples");
            witness = Some(Witness {
                packet: pull_back(arrival, &branch.steps),
                path: chain.nodes.iter().map(|n| n.id.clone()).collect(),
            });
            break;
        }
        if witness.is_some() {
            break;
        }
    }
    Ok(Verdict {
        holds: witness.is_some(),
        witness,
        cause: None,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Can no concrete packet of `p.traffic`, under any resolution of MAY
/// branches, arrive at `p.to`? The exact complement of reachability.
pub fn check_isolation(g: &Nffg, p: &Policy) -> Result<Verdict, VerifyError> {
    let started = Instant::now();
    let reach = check_reachability(g, p)?;
    Ok(Verdict {
        holds: !reach.holds,
        witness: None,
        cause: None,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Attributes a holding isolation to the first node at which the propagated
/// class dies, by running reachability over growing chain prefixes (the
/// class entering prefix end k is re-derived for each k). The first chain
/// between the endpoints that admits any of `p.traffic` provides the cause;
/// vacuous isolations (no chain admits the traffic) have none.
pub fn root_cause_isolation(g: &Nffg, p: &Policy) -> Result<Verdict, VerifyError> {
    let started = Instant::now();
    let iso = check_isolation(g, p)?;
    if !iso.holds {
        return Err(VerifyError::NotIsolated);
    }
    let chains = checked_chains(g, p)?;
    let mut cause = None;
    'chains: for chain in &chains {
        let seed = p.traffic.intersect(&chain.traffic_class);
        if seed.is_empty() {
            continue;
        }
        // prefix k spans nodes[0..=k]; propagation yields the class
        // entering nodes[k]
        for k in 1..chain.nodes.len() {
            let alive = propagate(g, &chain.nodes[0..=k], &seed)
                .iter()
                .any(|b| !b.class.is_empty());
            if !alive {
                let culprit = &chain.nodes[k - 1];
                cause = Some(Cause {
                    node: culprit.id.clone(),
                    kind: culprit.kind,
                });
                break 'chains;
            }
        }
    }
    Ok(Verdict {
        holds: true,
        witness: None,
        cause,
        elapsed_ms: started.elapsed().as_secs_f64() * 1e3,
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchItem {
    pub policy: Policy,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub verdict: Option<Verdict>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct KindStats {
    pub count: usize,
    /// Wall-clock aggregates live only in memory and the timing CSV; they
    /// are skipped here so serialized reports stay byte-deterministic.
    #[serde(skip)]
    pub mean_ms: f64,
    #[serde(skip)]
    pub max_ms: f64,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct BatchSummary {
    pub reachability: KindStats,
    pub isolation: KindStats,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BatchReport {
    pub items: Vec<BatchItem>,
    pub summary: BatchSummary,
}

/// Checks every policy in order; per-policy failures become items, never
/// abort the batch. Holding isolations are completed with their root cause
/// whenever the connecting chains contain a firewall.
pub fn verify_policy_set(g: &Nffg, policies: &[Policy]) -> BatchReport {
    let mut items = Vec::with_capacity(policies.len());
    let mut stats: Vec<(PolicyKind, f64)> = Vec::new();
    for p in policies {
        let result = match p.kind {
            PolicyKind::Reachability => check_reachability(g, p),
            PolicyKind::Isolation => check_isolation(g, p).and_then(|v| {
                if v.holds && chains_have_firewall(g, p) {
                    // keep total elapsed: the attribution is part of the check
                    let started = Instant::now();
                    let mut rc = root_cause_isolation(g, p)?;
                    rc.elapsed_ms = v.elapsed_ms + started.elapsed().as_secs_f64() * 1e3;
                    Ok(rc)
                } else {
                    Ok(v)
                }
            }),
        };
        match result {
            Ok(v) => {
                stats.push((p.kind, v.elapsed_ms));
                items.push(BatchItem {
                    policy: p.clone(),
                    verdict: Some(v),
                    error: None,
                });
            }
            Err(e) => items.push(BatchItem {
                policy: p.clone(),
                verdict: None,
                error: Some(e.to_string()),
            }),
        }
    }
    let summarize = |kind: PolicyKind| {
        let times: Vec<f64> = stats
            .iter()
            .filter(|(k, _)| *k == kind)
            .map(|(_, t)| *t)
            .collect();
        KindStats {
            count: times.len(),
            mean_ms: if times.is_empty() {
                0.0
            } else {
                times.iter().sum::<f64>() / times.len() as f64
            },
            max_ms: times.iter().copied().fold(0.0, f64::max),
        }
    };
    BatchReport {
        summary: BatchSummary {
            reachability: summarize(PolicyKind::Reachability),
            isolation: summarize(PolicyKind::Isolation),
        },
        items,
    }
}

fn chains_have_firewall(g: &Nffg, p: &Policy) -> bool {
    extract_chains(g)
        .map(|chains| {
            chains.iter().any(|c| {
                c.client() == &p.from
                    && c.server() == &p.to
                    && c.nodes
                        .iter()
                        .any(|n| n.kind == nffg_core::vnf::VnfKind::AclFw)
            })
        })
        .unwrap_or(false)
}
