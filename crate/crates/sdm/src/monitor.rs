// SPDX-License-Identifier: Apache-2.0

//! Monitor deployment: attaches one rate monitor to every port of a graph
//! node and tracks the live set, so elastic scale operations can install
//! and retire observability per instance.

use std::collections::BTreeMap;

use nffg_core::graph::{Nffg, NodeId, PortId};

use crate::ratemon::{RateEstimate, RateMon, RateMonError};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonitorHandle {
    pub node: NodeId,
    /// Topic the node's estimates are published on.
    pub topic: String,
    pub ports: Vec<PortId>,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum MonitorError {
    #[error("node {0} does not exist in the graph")]
    UnknownNode(NodeId),
    #[error("no monitor attached to {node}:{port}")]
    NotMonitored { node: NodeId, port: PortId },
    #[error(transparent)]
    Rate(#[from] RateMonError),
}

pub fn rate_topic(node: &NodeId) -> String {
    format!("mf.rate.{node}")
}

/// Live monitors keyed by (node, port), all sharing one window size and
/// capacity threshold.
#[derive(Clone, Debug)]
pub struct MonitorRegistry {
    window: usize,
    capacity: f64,
    mons: BTreeMap<(NodeId, PortId), RateMon>,
}

impl MonitorRegistry {
    pub fn new(window: usize, capacity: f64) -> Self {
        MonitorRegistry {
            window,
            capacity,
            mons: BTreeMap::new(),
        }
    }

    /// Attaches a monitor to each port of `node`. Idempotent: a second call
    /// returns the same handle without touching the existing monitors.
    pub fn deploy_monitor(&mut self, g: &Nffg, node: &NodeId) -> Result<MonitorHandle, MonitorError> {
        let inst = g
            .instance(node)
            .ok_or_else(|| MonitorError::UnknownNode(node.clone()))?;
        for port in &inst.ports {
            let key = (node.clone(), port.clone());
            self.mons.entry(key).or_insert_with(|| {
                RateMon::new(format!("{node}:{port}"), self.window, self.capacity)
            });
        }
        Ok(MonitorHandle {
            node: node.clone(),
            topic: rate_topic(node),
            ports: inst.ports.clone(),
        })
    }

    /// Removes every monitor of `node`; true when any existed.
    pub fn retire(&mut self, node: &NodeId) -> bool {
        let before = self.mons.len();
        self.mons.retain(|(n, _), _| n != node);
        self.mons.len() != before
    }

    /// Feeds one sample; yields an estimate when the port's window fills.
    pub fn push(
        &mut self,
        node: &NodeId,
        port: &PortId,
        timestamp: u64,
        mbps: f64,
    ) -> Result<Option<RateEstimate>, MonitorError> {
        let mon = self
            .mons
            .get_mut(&(node.clone(), port.clone()))
            .ok_or_else(|| MonitorError::NotMonitored {
                node: node.clone(),
                port: port.clone(),
            })?;
        Ok(mon.push(timestamp, mbps)?)
    }

    pub fn active_count(&self) -> usize {
        self.mons.len()
    }

    pub fn is_monitored(&self, node: &NodeId) -> bool {
        self.mons.keys().any(|(n, _)| n == node)
    }

    pub fn monitored_ports(&self) -> Vec<(NodeId, PortId)> {
        self.mons.keys().cloned().collect()
    }
}
