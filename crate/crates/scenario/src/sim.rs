// SPDX-License-Identifier: Apache-2.0

//! The closed-loop simulation: seeded traffic feeds per-port monitors whose
//! windowed estimates flow over the broker to a local analytics point; its
//! triggers drive a control app that asks the orchestrator — once per scale
//! operation — to apply a pre-verified graph update. Everything is
//! event-driven off the tick counter and fully deterministic per seed.

use std::collections::BTreeMap;

use nffg_core::fixtures::{elastic_scale_batch, firewall_count, vcpe_elastic, AclPreset};
use nffg_core::graph::{Nffg, NodeId};
use nffg_core::update::apply_batch;
use nffg_core::vnf::VnfKind;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use sdm::{
    aggregate_step, rate_topic, AggregationSpec, AggregatorState, BrokerTree, Combine, Envelope,
    MonitorRegistry, RateEstimate, Scope, TriggerEvent, TriggerLevel,
};
use serde::{Deserialize, Serialize};
use statrs::distribution::ContinuousCDF;
use verifier::{verify_policy_set, BatchReport, Policy};

use crate::config::{ConfigError, ScenarioConfig, WINDOW};

/// A LOW trigger is vetoed when removing one instance is projected to push
/// the risk back above this fraction of the scale-out threshold.
pub const SCALE_IN_MARGIN: f64 = 0.5;

const TRIGGER_TOPIC: &str = "trigger.elastic_fw.scale";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum EventKind {
    /// Raw samples taken this tick.
    Sampled { n: u64 },
    /// Estimates emitted this tick.
    Estimated { n: u64 },
    Trigger { level: TriggerLevel, value: f64 },
    /// A LOW trigger rejected by the risk projection.
    Veto { target: usize, projected: f64 },
    /// HIGH at the instance ceiling.
    Saturated,
    /// LOW at the single-instance floor.
    Floored,
    /// The orchestrator was invoked with a scale request.
    CentralNotify { target: usize },
    Verified { pass: bool },
    ScaleApplied { from: usize, to: usize },
    ScaleRejected { target: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub kind: EventKind,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LedgerCounters {
    pub raw_samples: u64,
    pub estimates: u64,
    pub local_triggers: u64,
    pub central_events: u64,
    pub scale_ops: u64,
    pub verification_runs: u64,
}

/// Counters plus the timestamped event log they are derived from.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EventLedger {
    pub counters: LedgerCounters,
    pub log: Vec<Event>,
}

impl EventLedger {
    fn note(&mut self, tick: u64, kind: EventKind) {
        let c = &mut self.counters;
        match &kind {
            EventKind::Sampled { n } => c.raw_samples += n,
            EventKind::Estimated { n } => c.estimates += n,
            EventKind::Trigger { .. } => c.local_triggers += 1,
            EventKind::CentralNotify { .. } => c.central_events += 1,
            EventKind::Verified { .. } => c.verification_runs += 1,
            EventKind::ScaleApplied { .. } => c.scale_ops += 1,
            _ => {}
        }
        self.log.push(Event { tick, kind });
    }

    /// Re-derives the counters from the event log alone.
    pub fn recount(&self) -> LedgerCounters {
        let mut c = LedgerCounters::default();
        for e in &self.log {
            match &e.kind {
                EventKind::Sampled { n } => c.raw_samples += n,
                EventKind::Estimated { n } => c.estimates += n,
                EventKind::Trigger { .. } => c.local_triggers += 1,
                EventKind::CentralNotify { .. } => c.central_events += 1,
                EventKind::Verified { .. } => c.verification_runs += 1,
                EventKind::ScaleApplied { .. } => c.scale_ops += 1,
                _ => {}
            }
        }
        c
    }
}

/// One row per window boundary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimePoint {
    pub tick: u64,
    pub instances: usize,
    pub monitors: usize,
    pub offered_mbps: f64,
    pub max_risk: f64,
    pub mean_risk: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkPoint {
    pub tick: u64,
    pub link: String,
    pub risk: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleRecord {
    pub tick: u64,
    pub from: usize,
    pub to: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PortStat {
    pub mean_mbps: f64,
    pub risk: f64,
}

#[derive(Clone, Debug)]
pub struct SimOutput {
    pub ledger: EventLedger,
    pub series: Vec<TimePoint>,
    pub links: Vec<LinkPoint>,
    pub scale_records: Vec<ScaleRecord>,
    pub final_graph: Nffg,
    pub broker: BrokerTree,
    /// Latest per-port window statistics, keyed `node:port`.
    pub port_stats: BTreeMap<String, PortStat>,
    /// The pre-deployment verification that admitted the initial graph.
    pub initial_report: BatchReport,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("initial deployment rejected: {failing} of {total} policies do not hold")]
    DeploymentRejected {
        report: BatchReport,
        failing: usize,
        total: usize,
    },
    #[error("graph: {0}")]
    Graph(String),
    #[error("i/o: {0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScaleDecision {
    Out { to: usize },
    In { to: usize },
}

/// The local elasticity policy. HIGH asks for one more instance below the
/// ceiling; LOW asks for one fewer above the floor, unless the projection
/// says the survivors would immediately run hot again.
pub fn control_app_decide(
    trigger: &TriggerEvent,
    current: usize,
    cfg: &ScenarioConfig,
) -> Option<ScaleDecision> {
    match trigger.level {
        TriggerLevel::High if current < cfg.max_firewalls => Some(ScaleDecision::Out { to: current + 1 }),
        TriggerLevel::High => None,
        TriggerLevel::Low if current > 1 => {
            let projected = projected_risk_after_scale_in(trigger.value, current, cfg);
            if projected >= cfg.scale_out_risk * SCALE_IN_MARGIN {
                None
            } else {
                Some(ScaleDecision::In { to: current - 1 })
            }
        }
        TriggerLevel::Low => None,
    }
}

/// Inverts the observed risk into a per-instance load estimate, spreads it
/// over one fewer instance, and maps it back to a risk.
pub fn projected_risk_after_scale_in(risk: f64, current: usize, cfg: &ScenarioConfig) -> f64 {
    debug_assert!(current > 1);
    let std = statrs::distribution::Normal::new(0.0, 1.0).unwrap();
    let sd = cfg.traffic.noise_sd.max(1e-9);
    let z = std.inverse_cdf(1.0 - risk.clamp(1e-12, 1.0 - 1e-12));
    let mean = (cfg.capacity - z * sd).max(0.0);
    let mean_after = mean * current as f64 / (current - 1) as f64;
    std.sf((cfg.capacity - mean_after) / sd).clamp(0.0, 1.0)
}

fn firewall_ids(g: &Nffg) -> Vec<NodeId> {
    g.nodes_of_kind(VnfKind::AclFw).map(|n| n.id.clone()).collect()
}

/// Per-instance offered-load shares: the configured imbalance when its
/// length matches the live instance count, an even split otherwise.
fn shares(cfg: &ScenarioConfig, n: usize) -> Vec<f64> {
    if cfg.traffic.imbalance.len() == n {
        cfg.traffic.imbalance.clone()
    } else {
        vec![1.0 / n as f64; n]
    }
}

fn all_hold(report: &BatchReport) -> bool {
    !report.items.is_empty()
        && report
            .items
            .iter()
            .all(|it| it.verdict.as_ref().is_some_and(|v| v.holds))
}

/// Builds the graph a config names: the stock elastic gateway or a file.
pub fn resolve_graph(cfg: &ScenarioConfig) -> Result<Nffg, ScenarioError> {
    if cfg.graph == "builtin:vcpe-elastic" {
        Ok(vcpe_elastic(cfg.initial_firewalls, AclPreset::PermitAll))
    } else {
        nffg_core::io::load(&cfg.graph).map_err(|e| ScenarioError::Io(e.to_string()))
    }
}

pub fn resolve_policies(cfg: &ScenarioConfig) -> Result<Vec<Policy>, ScenarioError> {
    if cfg.policies == "builtin:vcpe" {
        Ok(crate::config::builtin_policies())
    } else {
        let text = std::fs::read_to_string(&cfg.policies)
            .map_err(|e| ScenarioError::Io(format!("{}: {e}", cfg.policies)))?;
        verifier::policies_from_json(&text).map_err(|e| ScenarioError::Io(e.to_string()))
    }
}

pub fn run_from_config(cfg: &ScenarioConfig) -> Result<SimOutput, ScenarioError> {
    let g0 = resolve_graph(cfg)?;
    let policies = resolve_policies(cfg)?;
    run_scenario(cfg, &g0, &policies)
}

struct Loop<'a> {
    cfg: &'a ScenarioConfig,
    policies: &'a [Policy],
    g: Nffg,
    registry: MonitorRegistry,
    broker: BrokerTree,
    ledger: EventLedger,
    agg_spec: AggregationSpec,
    agg_state: AggregatorState,
    pending: Vec<RateEstimate>,
    series: Vec<TimePoint>,
    links: Vec<LinkPoint>,
    scale_records: Vec<ScaleRecord>,
    port_stats: BTreeMap<String, PortStat>,
    rng: ChaCha8Rng,
    noise: Normal<f64>,
}

/// Runs the full control loop. The initial graph must validate and satisfy
/// every policy, otherwise the deployment is rejected before the first tick.
pub fn run_scenario(
    cfg: &ScenarioConfig,
    g0: &Nffg,
    policies: &[Policy],
) -> Result<SimOutput, ScenarioError> {
    cfg.validate()?;
    if let Some(v) = g0.validate().into_iter().next() {
        return Err(ScenarioError::Graph(v.to_string()));
    }
    let current = firewall_count(g0);
    if current < 1 || current > cfg.max_firewalls {
        return Err(ScenarioError::Graph(format!(
            "{current} firewall instances outside 1..={}",
            cfg.max_firewalls
        )));
    }

    let mut ledger = EventLedger::default();
    let initial_report = verify_policy_set(g0, policies);
    ledger.note(0, EventKind::Verified { pass: all_hold(&initial_report) });
    if !all_hold(&initial_report) {
        let failing = initial_report
            .items
            .iter()
            .filter(|it| !it.verdict.as_ref().is_some_and(|v| v.holds))
            .count();
        let total = initial_report.items.len();
        return Err(ScenarioError::DeploymentRejected {
            report: initial_report,
            failing,
            total,
        });
    }

    let mut broker = BrokerTree::three_level(
        "root",
        &[("region-a", &["leaf-fw"][..]), ("region-b", &["leaf-edge"][..])],
    );
    for (client, tenant, at) in [
        ("analytics", "ops", "leaf-fw"),
        ("ctl", "ops", "leaf-fw"),
        ("orchestrator", "ops", "root"),
        ("edge-pub", "cpe", "leaf-edge"),
        ("edge-sub", "cpe", "leaf-edge"),
    ] {
        broker.register(client, tenant, at).expect("fresh broker");
    }
    broker.subscribe("ctl", TRIGGER_TOPIC).expect("registered");
    // the second tenant shadows an ops topic name; it must never leak over
    broker.subscribe("edge-sub", "mf.rate.fw1").expect("registered");

    let mut lp = Loop {
        cfg,
        policies,
        g: g0.clone(),
        registry: MonitorRegistry::new(WINDOW, cfg.capacity),
        broker,
        ledger,
        agg_spec: AggregationSpec {
            inputs: Vec::new(),
            combine: Combine::Max,
            threshold_high: cfg.scale_out_risk,
            threshold_low: cfg.scale_in_risk,
            sustain: cfg.sustain,
            action: TRIGGER_TOPIC.into(),
        },
        agg_state: AggregatorState::default(),
        pending: Vec::new(),
        series: Vec::new(),
        links: Vec::new(),
        scale_records: Vec::new(),
        port_stats: BTreeMap::new(),
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        noise: Normal::new(0.0, cfg.traffic.noise_sd.max(0.0)).expect("finite sd"),
    };
    lp.sync_monitors();

    let ticks = cfg.duration_s * 100;
    for t in 1..=ticks {
        lp.sample_tick(t);
        if t % WINDOW as u64 == 0 {
            lp.window_boundary(t);
        }
    }

    Ok(SimOutput {
        ledger: lp.ledger,
        series: lp.series,
        links: lp.links,
        scale_records: lp.scale_records,
        final_graph: lp.g,
        broker: lp.broker,
        port_stats: lp.port_stats,
        initial_report,
    })
}

impl Loop<'_> {
    /// Aligns monitors, broker registrations, and the aggregation inputs
    /// with the graph's current firewall set.
    fn sync_monitors(&mut self) {
        let live = firewall_ids(&self.g);
        for node in &live {
            self.registry.deploy_monitor(&self.g, node).expect("node exists");
            let client = format!("monitor.{node}");
            self.broker.register(&client, "ops", "leaf-fw").expect("leaf exists");
            self.broker
                .subscribe("analytics", &rate_topic(node))
                .expect("analytics registered");
        }
        let stale: Vec<NodeId> = self
            .registry
            .monitored_ports()
            .into_iter()
            .map(|(n, _)| n)
            .filter(|n| !live.contains(n))
            .collect();
        for node in stale {
            self.registry.retire(&node);
            self.broker.unsubscribe("analytics", &rate_topic(&node));
            self.broker.unregister(&format!("monitor.{node}"));
        }
        self.agg_spec.inputs = live.iter().map(rate_topic).collect();
    }

    fn offered(&self, tick: u64) -> f64 {
        let t_s = tick as f64 / 100.0;
        (self.cfg.traffic.base_rate + self.cfg.traffic.ramp * t_s).max(0.0)
    }

    /// One tick: every monitored port observes its instance's share of the
    /// offered load plus noise; filled windows publish estimates that reach
    /// the analytics point over the broker.
    fn sample_tick(&mut self, t: u64) {
        let live = firewall_ids(&self.g);
        let share = shares(self.cfg, live.len());
        let offered = self.offered(t);
        let ports = self.registry.monitored_ports();
        let mut sampled = 0;
        let mut estimated = 0;
        for (node, port) in ports {
            let idx = live.iter().position(|n| *n == node).expect("monitored = live");
            let mbps = (offered * share[idx] + self.noise.sample(&mut self.rng)).max(0.0);
            sampled += 1;
            let est = self
                .registry
                .push(&node, &port, t, mbps)
                .expect("monitor exists and time advances");
            if let Some(est) = est {
                estimated += 1;
                let payload = serde_json::to_string(&est).expect("estimate serializes");
                let env = Envelope::publish(
                    "ops",
                    format!("monitor.{node}"),
                    rate_topic(&node),
                    Scope::Node,
                    payload,
                );
                for (client, delivered) in self.broker.route(&env).expect("sender registered") {
                    if client == "analytics" {
                        let est: RateEstimate =
                            serde_json::from_str(&delivered.payload).expect("payload round-trips");
                        self.port_stats.insert(
                            est.link_id.clone(),
                            PortStat { mean_mbps: est.mean, risk: est.risk },
                        );
                        self.pending.push(est);
                    }
                }
            }
        }
        if sampled > 0 {
            self.ledger.note(t, EventKind::Sampled { n: sampled });
        }
        if estimated > 0 {
            self.ledger.note(t, EventKind::Estimated { n: estimated });
        }
    }

    /// Once per second: aggregate the window's estimates, let the control
    /// app react to any trigger, record the time series.
    fn window_boundary(&mut self, t: u64) {
        let window = std::mem::take(&mut self.pending);
        let (max_risk, mean_risk) = if window.is_empty() {
            (0.0, 0.0)
        } else {
            let risks: Vec<f64> = window.iter().map(|e| e.risk).collect();
            (
                risks.iter().copied().fold(0.0, f64::max),
                risks.iter().sum::<f64>() / risks.len() as f64,
            )
        };
        for est in &window {
            self.links.push(LinkPoint {
                tick: t,
                link: est.link_id.clone(),
                risk: est.risk,
            });
        }

        let (trigger, next) = aggregate_step(&self.agg_spec, &window, self.agg_state);
        self.agg_state = next;
        if let Some(trigger) = trigger {
            self.ledger.note(
                t,
                EventKind::Trigger { level: trigger.level, value: trigger.value },
            );
            let env = Envelope::publish(
                "ops",
                "analytics",
                &trigger.topic,
                Scope::Region,
                serde_json::to_string(&trigger).expect("trigger serializes"),
            );
            for (client, delivered) in self.broker.route(&env).expect("analytics registered") {
                if client == "ctl" {
                    let trigger: TriggerEvent =
                        serde_json::from_str(&delivered.payload).expect("payload round-trips");
                    self.control_app(t, &trigger);
                }
            }
        }

        // second-tenant background chatter: same topic name, other tenant
        let env = Envelope::publish("cpe", "edge-pub", "mf.rate.fw1", Scope::Node, "{}");
        self.broker.route(&env).expect("edge-pub registered");

        self.series.push(TimePoint {
            tick: t,
            instances: firewall_count(&self.g),
            monitors: self.registry.active_count(),
            offered_mbps: self.offered(t),
            max_risk,
            mean_risk,
        });
    }

    fn control_app(&mut self, t: u64, trigger: &TriggerEvent) {
        let current = firewall_count(&self.g);
        let decision = control_app_decide(trigger, current, self.cfg);
        let Some(decision) = decision else {
            let kind = match trigger.level {
                TriggerLevel::High => EventKind::Saturated,
                TriggerLevel::Low if current == 1 => EventKind::Floored,
                TriggerLevel::Low => EventKind::Veto {
                    target: current - 1,
                    projected: projected_risk_after_scale_in(trigger.value, current, self.cfg),
                },
            };
            self.ledger.note(t, kind);
            return;
        };
        let target = match decision {
            ScaleDecision::Out { to } | ScaleDecision::In { to } => to,
        };
        let env = Envelope::notify(
            "ops",
            "ctl",
            "orchestrator",
            "scale.request",
            serde_json::to_string(&decision).expect("decision serializes"),
        );
        for (client, _) in self.broker.route(&env).expect("ctl registered") {
            if client == "orchestrator" {
                self.ledger.note(t, EventKind::CentralNotify { target });
                self.orchestrate(t, target);
            }
        }
    }

    /// The single centralized step: build the update, verify the candidate
    /// graph, and only then swap it in and realign the monitoring plane.
    fn orchestrate(&mut self, t: u64, target: usize) {
        let from = firewall_count(&self.g);
        let batch = elastic_scale_batch(&self.g, target);
        let candidate = match apply_batch(&self.g, &batch) {
            Ok(g) => g,
            Err(_) => {
                self.ledger.note(t, EventKind::ScaleRejected { target });
                return;
            }
        };
        let report = verify_policy_set(&candidate, self.policies);
        let pass = all_hold(&report);
        self.ledger.note(t, EventKind::Verified { pass });
        if !pass {
            self.ledger.note(t, EventKind::ScaleRejected { target });
            let env = Envelope::publish(
                "ops",
                "orchestrator",
                "alarm.ops.scale-rejected",
                Scope::Global,
                format!("{{\"target\":{target}}}"),
            );
            self.broker.route(&env).expect("orchestrator registered");
            return;
        }
        self.g = candidate;
        self.ledger.note(t, EventKind::ScaleApplied { from, to: target });
        self.scale_records.push(ScaleRecord { tick: t, from, to: target });
        self.sync_monitors();
        // new fleet, fresh hysteresis regime
        self.agg_state = AggregatorState::default();
    }
}
