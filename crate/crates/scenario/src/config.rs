// SPDX-License-Identifier: Apache-2.0

//! Scenario configuration: a small TOML document describing the workload,
//! the scaling thresholds, and where the graph and policies come from.

use nffg_core::pc::{AppClass, PacketClass, SpamFlag};
use nffg_core::NodeId;
use serde::{Deserialize, Serialize};
use verifier::{Policy, PolicyKind};

/// Simulation tick length; 100 ticks per simulated second.
pub const TICK_MS: u64 = 10;
/// Samples per estimate window (one estimate per port per second).
pub const WINDOW: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrafficModel {
    /// Offered load at t = 0, Mbit/s.
    pub base_rate: f64,
    /// Linear growth, Mbit/s per simulated second.
    pub ramp: f64,
    /// Per-sample Gaussian noise.
    pub noise_sd: f64,
    /// Per-instance load shares; empty means the balancer splits evenly.
    /// Used by troubleshooting fixtures to stage a skewed balancer.
    #[serde(default)]
    pub imbalance: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub duration_s: u64,
    #[serde(default = "default_tick_ms")]
    pub tick_ms: u64,
    pub initial_firewalls: usize,
    #[serde(default = "default_max_firewalls")]
    pub max_firewalls: usize,
    pub capacity: f64,
    pub scale_out_risk: f64,
    pub scale_in_risk: f64,
    pub sustain: u32,
    /// `builtin:vcpe-elastic` or a path to a graph file.
    #[serde(default = "default_graph")]
    pub graph: String,
    /// `builtin:vcpe` or a path to a policy file.
    #[serde(default = "default_policies")]
    pub policies: String,
    pub traffic: TrafficModel,
}

fn default_tick_ms() -> u64 {
    TICK_MS
}
fn default_max_firewalls() -> usize {
    20
}
fn default_graph() -> String {
    "builtin:vcpe-elastic".into()
}
fn default_policies() -> String {
    "builtin:vcpe".into()
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("config does not parse: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

impl ScenarioConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig =
            toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let fail = |m: String| Err(ConfigError::Invalid(m));
        if self.tick_ms != TICK_MS {
            return fail(format!("tick_ms is pinned to {TICK_MS}"));
        }
        if self.initial_firewalls < 1 || self.initial_firewalls > self.max_firewalls {
            return fail(format!(
                "initial_firewalls {} outside 1..={}",
                self.initial_firewalls, self.max_firewalls
            ));
        }
        if self.scale_in_risk >= self.scale_out_risk {
            return fail(format!(
                "scale_in_risk {} must stay below scale_out_risk {}",
                self.scale_in_risk, self.scale_out_risk
            ));
        }
        if self.capacity <= 0.0 {
            return fail("capacity must be positive".into());
        }
        if self.sustain < 1 {
            return fail("sustain must be at least 1".into());
        }
        if !self.traffic.imbalance.is_empty() {
            let sum: f64 = self.traffic.imbalance.iter().sum();
            if self.traffic.imbalance.iter().any(|&s| s < 0.0) || (sum - 1.0).abs() > 1e-9 {
                return fail("imbalance shares must be non-negative and sum to 1".into());
            }
        }
        Ok(())
    }

    /// Steady low load on a full fleet: nothing should ever trigger.
    pub fn flat_demo() -> Self {
        ScenarioConfig {
            seed: 1,
            duration_s: 60,
            tick_ms: TICK_MS,
            initial_firewalls: 20,
            max_firewalls: 20,
            capacity: 100.0,
            scale_out_risk: 0.3,
            scale_in_risk: 0.0,
            sustain: 3,
            graph: default_graph(),
            policies: default_policies(),
            traffic: TrafficModel {
                base_rate: 20.0,
                ramp: 0.0,
                noise_sd: 5.0,
                imbalance: Vec::new(),
            },
        }
    }

    /// Load ramping to twice the capacity over two minutes, starting from a
    /// single instance: forces scale-outs and a plateau.
    pub fn ramp_demo() -> Self {
        ScenarioConfig {
            seed: 7,
            duration_s: 120,
            tick_ms: TICK_MS,
            initial_firewalls: 1,
            max_firewalls: 20,
            capacity: 100.0,
            scale_out_risk: 0.3,
            scale_in_risk: 0.05,
            sustain: 3,
            graph: default_graph(),
            policies: default_policies(),
            traffic: TrafficModel {
                base_rate: 20.0,
                ramp: 1.5,
                noise_sd: 25.0,
                imbalance: Vec::new(),
            },
        }
    }
}

/// The stock policy set for the elastic gateway: each application class
/// reaches its server on its service port, spam dies at the filter, and
/// foreign application classes stay off the other servers.
pub fn builtin_policies() -> Vec<Policy> {
    use nffg_core::fixtures::{EMAIL_PORT, OTHER_PORT, WEB_PORT};
    use nffg_core::pc::IntervalSet;
    let app = |a: AppClass, port: u32| {
        PacketClass::full()
            .with_app_class([a].into_iter().collect())
            .with_dst_port(IntervalSet::from_intervals([(port, port)]))
    };
    let mk = |kind, to: &str, traffic: PacketClass| Policy {
        kind,
        from: NodeId::from("client"),
        to: NodeId::from(to),
        traffic,
    };
    vec![
        mk(
            PolicyKind::Reachability,
            "srv_email",
            app(AppClass::Email, EMAIL_PORT)
                .with_spam_flag([SpamFlag::Ham].into_iter().collect()),
        ),
        mk(PolicyKind::Reachability, "srv_web", app(AppClass::Web, WEB_PORT)),
        mk(PolicyKind::Reachability, "srv_other", app(AppClass::Other, OTHER_PORT)),
        mk(
            PolicyKind::Isolation,
            "srv_email",
            PacketClass::full().with_spam_flag([SpamFlag::Spam].into_iter().collect()),
        ),
        // isolation stays port-agnostic: no email packet of any kind may
        // reach the web server, and no web packet the catch-all server
        mk(
            PolicyKind::Isolation,
            "srv_web",
            PacketClass::full().with_app_class([AppClass::Email].into_iter().collect()),
        ),
        mk(
            PolicyKind::Isolation,
            "srv_other",
            PacketClass::full().with_app_class([AppClass::Web].into_iter().collect()),
        ),
    ]
}
