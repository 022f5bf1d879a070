// SPDX-License-Identifier: Apache-2.0

//! Programmable aggregation points: combine a set of per-link estimates
//! into one value and fire threshold triggers with sustain counting and a
//! hysteresis band, so oscillation around a single threshold can never
//! cause trigger flapping.

use serde::{Deserialize, Serialize};

use crate::ratemon::RateEstimate;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Combine {
    Max,
    Mean,
    /// Inner product with the input values; lengths must agree.
    WeightedSum(Vec<f64>),
}

/// What to watch and when to fire. `threshold_low ≤ threshold_high` forms
/// the hysteresis band; `sustain` is how many consecutive windows must
/// agree before a trigger fires.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregationSpec {
    /// Metric topics this aggregator consumes (one value per input).
    pub inputs: Vec<String>,
    pub combine: Combine,
    pub threshold_high: f64,
    pub threshold_low: f64,
    pub sustain: u32,
    /// Topic the trigger event is published on.
    pub action: String,
}

impl AggregationSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.threshold_low > self.threshold_high {
            return Err(format!(
                "threshold_low {} exceeds threshold_high {}",
                self.threshold_low, self.threshold_high
            ));
        }
        if self.sustain < 1 {
            return Err("sustain must be at least 1".into());
        }
        if let Combine::WeightedSum(w) = &self.combine {
            if w.len() != self.inputs.len() {
                return Err(format!(
                    "{} weights for {} inputs",
                    w.len(),
                    self.inputs.len()
                ));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TriggerLevel {
    High,
    Low,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TriggerEvent {
    pub topic: String,
    pub level: TriggerLevel,
    /// The combined value that crossed the threshold.
    pub value: f64,
}

/// High-side trigger phases. A fired aggregator re-arms only after the
/// combined value falls below the low threshold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
enum Phase {
    #[default]
    Idle,
    /// Above threshold_high, counting toward sustain.
    ArmedHigh,
    /// HIGH fired; suppressed until the value drops below threshold_low.
    Fired,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregatorState {
    phase: Phase,
    high_run: u32,
    low_run: u32,
}

pub fn combine_values(c: &Combine, values: &[f64]) -> f64 {
    match c {
        Combine::Max => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        Combine::Mean => values.iter().sum::<f64>() / values.len().max(1) as f64,
        Combine::WeightedSum(w) => values.iter().zip(w).map(|(v, w)| v * w).sum(),
    }
}

/// Advances the trigger state machine by one window of estimates. Combines
/// the congestion risks of `estimates`, then: a HIGH fires after `sustain`
/// consecutive windows above `threshold_high` and cannot fire again until
/// one window falls below `threshold_low`; a LOW fires after `sustain`
/// consecutive windows below `threshold_low` while not suppressed.
pub fn aggregate_step(
    spec: &AggregationSpec,
    estimates: &[RateEstimate],
    state: AggregatorState,
) -> (Option<TriggerEvent>, AggregatorState) {
    let risks: Vec<f64> = estimates.iter().map(|e| e.risk).collect();
    let value = combine_values(&spec.combine, &risks);
    step_value(spec, value, state)
}

/// The same state machine over an already-combined value.
pub fn step_value(
    spec: &AggregationSpec,
    value: f64,
    mut s: AggregatorState,
) -> (Option<TriggerEvent>, AggregatorState) {
    let fire = |level| {
        Some(TriggerEvent {
            topic: spec.action.clone(),
            level,
            value,
        })
    };
    if s.phase == Phase::Fired {
        // suppressed until the value re-enters from below the band
        if value < spec.threshold_low {
            s.phase = Phase::Idle;
            s.low_run = 0;
        }
        return (None, s);
    }
    if value > spec.threshold_high {
        s.high_run += 1;
        s.low_run = 0;
        s.phase = Phase::ArmedHigh;
        if s.high_run >= spec.sustain {
            s.phase = Phase::Fired;
            s.high_run = 0;
            return (fire(TriggerLevel::High), s);
        }
        return (None, s);
    }
    s.phase = Phase::Idle;
    s.high_run = 0;
    if value < spec.threshold_low {
        s.low_run += 1;
        if s.low_run >= spec.sustain {
            s.low_run = 0;
            return (fire(TriggerLevel::Low), s);
        }
    } else {
        s.low_run = 0;
    }
    (None, s)
}
