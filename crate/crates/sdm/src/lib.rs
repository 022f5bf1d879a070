// SPDX-License-Identifier: Apache-2.0

//! Software-defined monitoring plane: windowed rate estimation with
//! probabilistic congestion risk, programmable threshold aggregation with
//! hysteresis, per-node monitor deployment, and a hierarchical message
//! broker that keeps traffic at the lowest tier covering all parties.

pub mod aggregate;
pub mod broker;
pub mod monitor;
pub mod ratemon;

pub use aggregate::{
    aggregate_step, combine_values, step_value, AggregationSpec, AggregatorState, Combine,
    TriggerEvent, TriggerLevel,
};
pub use broker::{BrokerError, BrokerTree, Delivery, Envelope, Kind, Scope};
pub use monitor::{rate_topic, MonitorError, MonitorHandle, MonitorRegistry};
pub use ratemon::{ratemon_update, RateEstimate, RateMon, RateMonError, RateSample, DEFAULT_WINDOW};
