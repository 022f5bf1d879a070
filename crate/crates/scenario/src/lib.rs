// SPDX-License-Identifier: Apache-2.0

//! Deterministic discrete-event simulation of an elastic gateway: seeded
//! per-port traffic, windowed rate estimation, broker-mediated triggers, and
//! an orchestrator that verifies every candidate graph before applying it.
//!
//! - [`config`]: TOML-backed run configuration and the stock policy set.
//! - [`sim`]: the control loop, its event ledger, and the scale decision.
//! - [`report`]: byte-deterministic CSV/table exports.
//! - [`snapshot`]: frozen end state for offline troubleshooting.

pub mod config;
pub mod report;
pub mod sim;
pub mod snapshot;

pub use config::{builtin_policies, ScenarioConfig, TrafficModel, TICK_MS, WINDOW};
pub use report::{export_report, report_strings, REPORT_FILES};
pub use sim::{
    control_app_decide, projected_risk_after_scale_in, resolve_graph, resolve_policies,
    run_from_config, run_scenario, Event, EventKind, EventLedger, LedgerCounters, LinkPoint,
    PortStat, ScaleDecision, ScaleRecord, ScenarioError, SimOutput, TimePoint, SCALE_IN_MARGIN,
};
pub use snapshot::Snapshot;
