// SPDX-License-Identifier: Apache-2.0

//! Automated troubleshooting graphs: a small text format wires debugging
//! tools and decision guards into a DAG; executing it against a scenario
//! snapshot walks one hypothesis path and emits the verdict it reaches.
//!
//! - [`parse`]: the TSG file format and structural validation.
//! - [`expr`]: the guard-expression language of decision nodes.
//! - [`handle`]: the snapshot-backed infrastructure handle with symbolic
//!   (role-based, rename-stable) target resolution.
//! - [`tools`]: the tool adapters decision guards draw their metrics from.
//! - [`run`]: the walk itself and the resulting [`Diagnosis`].

pub mod error;
pub mod expr;
pub mod handle;
pub mod parse;
pub mod run;
pub mod tools;

pub use error::TsgError;
pub use expr::{decision_eval, Bindings, Expr, Value};
pub use handle::SimHandle;
pub use parse::{parse_tsg, Tsg, TsgEdge, TsgNode};
pub use run::{run_tsg, Diagnosis, Step, StepAction};
pub use tools::{tool_adapter, ToolResult};

/// The stock troubleshooting procedure for the elastic firewall: overload
/// the service, observe fleet size, cache-link load, and per-instance CPU,
/// probe the web path, then decide which component deserves debugging.
pub fn elastic_firewall_tsg() -> &'static str {
    r#"# Elastic-firewall troubleshooting procedure.
# Thresholds live here, not in code: imbalance ratio 0.5, high load 0.8.
node overload = tool traffic_gen(50, 5)
node fleet    = tool vnf_count(ACL_FW)
node cachelnk = tool link_load(webcache_nat_link)
node cpus     = tool cpu_load(firewall_group)
node webprobe = tool ping_path(client, web_server, WEB)
node verdict  = decision {imbalanced: stdev(cpu) / mean(cpu) > 0.5, congested: link_load > 0.8 and delta == 0, healthy: else}
node s_lb     = sink "debug LoadBalancer"
node s_ctl    = sink "debug ControlApp"
node s_ok     = sink "hypothesis rejected"
edge overload -> fleet
edge fleet -> cachelnk
edge cachelnk -> cpus
edge cpus -> webprobe
edge webprobe -> verdict
edge verdict:imbalanced -> s_lb
edge verdict:congested -> s_ctl
edge verdict:healthy -> s_ok
"#
}
