// SPDX-License-Identifier: Apache-2.0

//! Tool adapters: each named tool probes the handle and returns a bag of
//! named metrics for downstream decision guards, plus a raw text log.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use verifier::{check_reachability, Policy, PolicyKind};

use crate::error::TsgError;
use crate::expr::Value;
use crate::handle::SimHandle;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ToolResult {
    pub tool: String,
    /// Metric name → value; merged into the guard bindings downstream.
    pub values: BTreeMap<String, Value>,
    /// Human-readable log line.
    pub raw: String,
}

fn bad_args(tool: &str, msg: impl Into<String>) -> TsgError {
    TsgError::BadArgs { tool: tool.to_string(), msg: msg.into() }
}

fn num_arg(tool: &str, args: &[String], idx: usize) -> Result<f64, TsgError> {
    args.get(idx)
        .ok_or_else(|| bad_args(tool, format!("missing argument {idx}")))?
        .parse::<f64>()
        .map_err(|_| bad_args(tool, format!("argument {idx} must be numeric")))
}

fn str_arg<'a>(tool: &str, args: &'a [String], idx: usize) -> Result<&'a str, TsgError> {
    args.get(idx)
        .map(|s| s.as_str())
        .ok_or_else(|| bad_args(tool, format!("missing argument {idx}")))
}

/// Executes one named tool against the handle.
///
/// - `traffic_gen(delta_mbps, duration_s)`: add offered load; → `offered_mbps`
/// - `vnf_count(KIND)`: → `count`, `delta` (net change, firewalls only)
/// - `link_load(link_sym)`: → `link_load` (utilization of capacity)
/// - `cpu_load(firewall_group)`: → `cpu` (per-instance percentages)
/// - `ping_path(from_sym, to_sym, CLASS)`: → `reached`, `hop_count`
/// - `rate_risk(KIND or firewall_group)`: → `risk`
pub fn tool_adapter(
    name: &str,
    args: &[String],
    sim: &mut SimHandle,
) -> Result<ToolResult, TsgError> {
    let mut values = BTreeMap::new();
    let raw = match name {
        "traffic_gen" => {
            let delta = num_arg(name, args, 0)?;
            let duration = num_arg(name, args, 1)?;
            sim.offered_total = (sim.offered_total + delta).max(0.0);
            values.insert("offered_mbps".into(), Value::Num(sim.offered_total));
            format!(
                "injected {delta:+.1} Mbit/s for {duration:.0} s; offered load now {:.1} Mbit/s",
                sim.offered_total
            )
        }
        "vnf_count" => {
            let kind_name = str_arg(name, args, 0)?;
            let kind = SimHandle::resolve_kind(kind_name)
                .ok_or_else(|| TsgError::UnresolvedReference { name: kind_name.to_string() })?;
            let count = sim.graph.nodes_of_kind(kind).count();
            let delta = if kind == nffg_core::vnf::VnfKind::AclFw {
                sim.instance_delta
            } else {
                0
            };
            values.insert("count".into(), Value::Num(count as f64));
            values.insert("delta".into(), Value::Num(delta as f64));
            format!("{count} {kind_name} instances (net change {delta:+} over the window)")
        }
        "link_load" => {
            let link = str_arg(name, args, 0)?;
            let load = sim.link_load(link)?;
            values.insert("link_load".into(), Value::Num(load));
            format!(
                "{link} carries {:.1} of {:.1} Mbit/s: utilization {load:.3}",
                load * sim.capacity,
                sim.capacity
            )
        }
        "cpu_load" => {
            let group = str_arg(name, args, 0)?;
            if group != "firewall_group" {
                return Err(TsgError::UnresolvedReference { name: group.to_string() });
            }
            let cpus = sim.cpu_loads();
            let fws = sim.firewalls();
            let pairs: Vec<String> = fws
                .iter()
                .zip(&cpus)
                .map(|(id, c)| format!("{id}={c:.1}%"))
                .collect();
            values.insert("cpu".into(), Value::List(cpus));
            format!("per-instance cpu: {}", pairs.join(" "))
        }
        "ping_path" => {
            let from = sim.resolve_endpoint(str_arg(name, args, 0)?)?;
            let to = sim.resolve_endpoint(str_arg(name, args, 1)?)?;
            let class_name = str_arg(name, args, 2)?;
            let traffic = SimHandle::resolve_class(class_name)
                .ok_or_else(|| TsgError::UnresolvedReference { name: class_name.to_string() })?;
            let policy = Policy {
                kind: PolicyKind::Reachability,
                from: from.clone(),
                to: to.clone(),
                traffic,
            };
            let verdict = check_reachability(&sim.graph, &policy)
                .map_err(|e| TsgError::Snapshot(e.to_string()))?;
            match verdict.witness {
                Some(w) if verdict.holds => {
                    values.insert("reached".into(), Value::Num(1.0));
                    values.insert("hop_count".into(), Value::Num(w.path.len() as f64));
                    let hops: Vec<String> = w.path.iter().map(|n| n.to_string()).collect();
                    format!("{class_name} probe {from} -> {to}: {}", hops.join(" -> "))
                }
                _ => {
                    values.insert("reached".into(), Value::Num(0.0));
                    values.insert("hop_count".into(), Value::Num(0.0));
                    format!("{class_name} probe {from} -> {to}: no path")
                }
            }
        }
        "rate_risk" => {
            let target = str_arg(name, args, 0)?;
            let kind = if target == "firewall_group" {
                nffg_core::vnf::VnfKind::AclFw
            } else {
                SimHandle::resolve_kind(target)
                    .ok_or_else(|| TsgError::UnresolvedReference { name: target.to_string() })?
            };
            let risk = sim.max_risk_of_kind(kind);
            values.insert("risk".into(), Value::Num(risk));
            format!("worst overload risk across {target}: {risk:.4}")
        }
        _ => return Err(TsgError::UnknownTool { name: name.to_string() }),
    };
    Ok(ToolResult { tool: name.to_string(), values, raw })
}
