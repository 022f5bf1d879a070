// SPDX-License-Identifier: Apache-2.0

//! A frozen end-of-run state the troubleshooting tools can probe without
//! re-running the simulation.

use std::collections::BTreeMap;

use nffg_core::graph::Nffg;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::sim::{PortStat, SimOutput};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    /// Final service graph, embedded in its interchange form.
    pub graph: serde_json::Value,
    pub capacity: f64,
    /// Total offered load at the last window boundary (Mbit/s).
    pub offered_total: f64,
    /// Per-instance load shares, aligned with the sorted firewall ids.
    pub shares: Vec<f64>,
    /// Latest per-port window means, keyed `node:port`.
    pub port_mean_mbps: BTreeMap<String, f64>,
    /// Latest per-port overload risks, keyed `node:port`.
    pub port_risk: BTreeMap<String, f64>,
    /// (tick, instance count) at every window boundary.
    pub instance_history: Vec<(u64, usize)>,
}

impl Snapshot {
    pub fn from_output(out: &SimOutput, cfg: &ScenarioConfig) -> Snapshot {
        let n = nffg_core::fixtures::firewall_count(&out.final_graph);
        let offered_total = out.series.last().map_or(0.0, |tp| tp.offered_mbps);
        let shares = if cfg.traffic.imbalance.len() == n {
            cfg.traffic.imbalance.clone()
        } else {
            vec![1.0 / n.max(1) as f64; n.max(1)]
        };
        let graph = serde_json::from_str(&nffg_core::io::to_json_string(&out.final_graph))
            .expect("graph serializes to valid json");
        let (mut means, mut risks) = (BTreeMap::new(), BTreeMap::new());
        for (link, PortStat { mean_mbps, risk }) in &out.port_stats {
            means.insert(link.clone(), *mean_mbps);
            risks.insert(link.clone(), *risk);
        }
        Snapshot {
            graph,
            capacity: cfg.capacity,
            offered_total,
            shares,
            port_mean_mbps: means,
            port_risk: risks,
            instance_history: out.series.iter().map(|tp| (tp.tick, tp.instances)).collect(),
        }
    }

    pub fn nffg(&self) -> Result<Nffg, String> {
        nffg_core::io::from_json_str(&self.graph.to_string()).map_err(|e| e.to_string())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("snapshot serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Snapshot, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Net instance change over the recorded history.
    pub fn instance_delta(&self) -> i64 {
        match (self.instance_history.first(), self.instance_history.last()) {
            (Some((_, a)), Some((_, b))) => *b as i64 - *a as i64,
            _ => 0,
        }
    }
}
