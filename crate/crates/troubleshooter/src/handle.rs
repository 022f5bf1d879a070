// SPDX-License-Identifier: Apache-2.0

//! The infrastructure handle tools execute against: a frozen scenario
//! snapshot (or one produced by running a config now) plus the working
//! offered-load the traffic generator may perturb.
//!
//! Tools never see concrete node ids; they use symbolic names resolved
//! against the graph by role, so a diagnosis survives renaming.

use nffg_core::fixtures::firewall_count;
use nffg_core::graph::{Nffg, NodeId};
use nffg_core::pc::{AppClass, PacketClass, SpamFlag};
use nffg_core::vnf::VnfKind;
use scenario::{ScenarioConfig, Snapshot};
use std::collections::BTreeMap;

use crate::error::TsgError;

#[derive(Clone, Debug)]
pub struct SimHandle {
    pub graph: Nffg,
    pub capacity: f64,
    /// Working offered load; `traffic_gen` adds to it.
    pub offered_total: f64,
    /// Per-instance shares aligned with the sorted firewall ids.
    pub shares: Vec<f64>,
    /// Latest per-port overload risks from the run, keyed `node:port`.
    pub port_risk: BTreeMap<String, f64>,
    /// Net instance-count change over the observation window.
    pub instance_delta: i64,
}

impl SimHandle {
    pub fn from_snapshot(snap: &Snapshot) -> Result<SimHandle, TsgError> {
        let graph = snap.nffg().map_err(TsgError::Snapshot)?;
        let n = firewall_count(&graph);
        if snap.shares.len() != n {
            return Err(TsgError::Snapshot(format!(
                "{} shares for {n} firewall instances",
                snap.shares.len()
            )));
        }
        Ok(SimHandle {
            graph,
            capacity: snap.capacity,
            offered_total: snap.offered_total,
            shares: snap.shares.clone(),
            port_risk: snap.port_risk.clone(),
            instance_delta: snap.instance_delta(),
        })
    }

    /// Runs the scenario now and hands back its end state.
    pub fn from_run(cfg: &ScenarioConfig) -> Result<SimHandle, TsgError> {
        let out = scenario::run_from_config(cfg).map_err(|e| TsgError::Snapshot(e.to_string()))?;
        SimHandle::from_snapshot(&Snapshot::from_output(&out, cfg))
    }

    /// Sorted live firewall instances.
    pub fn firewalls(&self) -> Vec<NodeId> {
        self.graph
            .nodes_of_kind(VnfKind::AclFw)
            .map(|n| n.id.clone())
            .collect()
    }

    /// Synthetic per-instance CPU percentages: an instance serving share
    /// `s` of offered load `L` against capacity `C` runs at `s·L/C·100`.
    pub fn cpu_loads(&self) -> Vec<f64> {
        self.shares
            .iter()
            .map(|s| s * self.offered_total / self.capacity * 100.0)
            .collect()
    }

    /// Resolves a symbolic VNF-kind name (as used in TSG files).
    pub fn resolve_kind(name: &str) -> Option<VnfKind> {
        Some(match name {
            "ACL_FW" => VnfKind::AclFw,
            "NAT" => VnfKind::Nat,
            "WEB_CACHE" => VnfKind::WebCache,
            "ANTISPAM" => VnfKind::Antispam,
            "VPN_GW" => VnfKind::VpnGw,
            "LOAD_BALANCER" => VnfKind::LoadBalancer,
            "ENDPOINT" => VnfKind::Endpoint,
            _ => return None,
        })
    }

    /// Resolves a symbolic traffic-class name to a packet class.
    pub fn resolve_class(name: &str) -> Option<PacketClass> {
        let app = |a: AppClass| PacketClass::full().with_app_class([a].into_iter().collect());
        Some(match name {
            "WEB" => app(AppClass::Web),
            "EMAIL" => app(AppClass::Email),
            "OTHER" => app(AppClass::Other),
            "SPAM" => PacketClass::full().with_spam_flag([SpamFlag::Spam].into_iter().collect()),
            "HAM" => PacketClass::full().with_spam_flag([SpamFlag::Ham].into_iter().collect()),
            "ANY" => PacketClass::full(),
            _ => return None,
        })
    }

    /// Resolves a symbolic endpoint: `client` is the client endpoint;
    /// `web_server`/`email_server`/`other_server` is the terminal of the
    /// chain that admits the corresponding application class.
    pub fn resolve_endpoint(&self, name: &str) -> Result<NodeId, TsgError> {
        let unresolved = || TsgError::UnresolvedReference { name: name.to_string() };
        if name == "client" {
            return self.graph.client_endpoints().next().cloned().ok_or_else(unresolved);
        }
        let class = match name {
            "web_server" => Self::resolve_class("WEB"),
            "email_server" => Self::resolve_class("EMAIL"),
            "other_server" => Self::resolve_class("OTHER"),
            _ => None,
        }
        .ok_or_else(unresolved)?;
        let chains = nffg_core::extract_chains(&self.graph)
            .map_err(|e| TsgError::Snapshot(e.to_string()))?;
        chains
            .iter()
            .find(|c| !c.traffic_class.intersect(&class).is_empty())
            .map(|c| c.server().clone())
            .ok_or_else(unresolved)
    }

    /// Mean utilization of a symbolically named link: `webcache_nat_link`
    /// (any aggregate link before the balancer carries the full offered
    /// load) or `firewall_link_<i>` (the 1-based balancer backend, which
    /// carries that instance's share).
    pub fn link_load(&self, name: &str) -> Result<f64, TsgError> {
        let flow = match name {
            "webcache_nat_link" => {
                let cache = self.graph.nodes_of_kind(VnfKind::WebCache).next();
                let nat = self.graph.nodes_of_kind(VnfKind::Nat).next();
                if cache.is_none() || nat.is_none() {
                    return Err(TsgError::UnresolvedReference { name: name.to_string() });
                }
                self.offered_total
            }
            _ => match name
                .strip_prefix("firewall_link_")
                .and_then(|i| i.parse::<usize>().ok())
            {
                Some(i) if i >= 1 && i <= self.shares.len() => {
                    self.offered_total * self.shares[i - 1]
                }
                _ => return Err(TsgError::UnresolvedReference { name: name.to_string() }),
            },
        };
        Ok(flow / self.capacity)
    }

    /// Latest overload risk over the ports of all instances of a kind.
    pub fn max_risk_of_kind(&self, kind: VnfKind) -> f64 {
        self.graph
            .nodes_of_kind(kind)
            .flat_map(|n| {
                self.port_risk
                    .iter()
                    .filter(move |(k, _)| k.starts_with(&format!("{}:", n.id)))
                    .map(|(_, r)| *r)
            })
            .fold(0.0, f64::max)
    }
}
