// SPDX-License-Identifier: Apache-2.0

//! The trigger state machine: sustain counting, the hysteresis band, and
//! combiner arithmetic.

use proptest::prelude::*;
use sdm::{
    aggregate_step, combine_values, step_value, AggregationSpec, AggregatorState, Combine,
    RateEstimate, TriggerLevel,
};

fn spec(combine: Combine, high: f64, low: f64, sustain: u32) -> AggregationSpec {
    AggregationSpec {
        inputs: vec!["mf.rate.fw1".into(), "mf.rate.fw2".into()],
        combine,
        threshold_high: high,
        threshold_low: low,
        sustain,
        action: "trigger.elastic_fw.scale".into(),
    }
}

fn est(risk: f64) -> RateEstimate {
    RateEstimate {
        link_id: "fw1:in".into(),
        window_start: 0,
        window_end: 99,
        mean: 0.0,
        variance: 0.0,
        risk,
        n: 100,
    }
}

/// Runs a value sequence through the machine, returning (index, level) of
/// every fired trigger.
fn run(spec: &AggregationSpec, values: &[f64]) -> Vec<(usize, TriggerLevel)> {
    let mut state = AggregatorState::default();
    let mut fired = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let (t, next) = step_value(spec, v, state);
        state = next;
        if let Some(t) = t {
            fired.push((i, t.level));
        }
    }
    fired
}

#[test]
fn max_combiner_fires_high_in_one_window() {
    let spec = spec(Combine::Max, 0.8, 0.2, 1);
    let (trigger, _) = aggregate_step(&spec, &[est(0.1), est(0.9)], AggregatorState::default());
    let trigger = trigger.unwrap();
    assert_eq!(trigger.level, TriggerLevel::High);
    assert_eq!(trigger.value, 0.9);
    assert_eq!(trigger.topic, "trigger.elastic_fw.scale");
}

#[test]
fn interrupted_sustain_never_fires() {
    let spec = spec(Combine::Max, 0.8, 0.2, 3);
    assert_eq!(run(&spec, &[0.9, 0.9, 0.1]), Vec::new());
}

#[test]
fn sustain_met_on_the_third_consecutive_window() {
    let spec = spec(Combine::Max, 0.8, 0.2, 3);
    assert_eq!(
        run(&spec, &[0.9, 0.9, 0.9]),
        vec![(2, TriggerLevel::High)]
    );
}

#[test]
fn sawtooth_across_the_band_never_triggers() {
    let spec = spec(Combine::Max, 0.8, 0.2, 2);
    let sawtooth: Vec<f64> = (0..100).map(|i| if i % 2 == 0 { 0.9 } else { 0.1 }).collect();
    assert_eq!(run(&spec, &sawtooth), Vec::new());
}

#[test]
fn high_cannot_refire_until_the_value_leaves_the_band_below() {
    let spec = spec(Combine::Max, 0.8, 0.2, 1);
    // the dip at index 4 only re-arms; no LOW until a further low window
    let fired = run(&spec, &[0.9, 0.85, 0.5, 0.9, 0.1, 0.9]);
    assert_eq!(fired, vec![(0, TriggerLevel::High), (5, TriggerLevel::High)]);

    let fired = run(&spec, &[0.9, 0.1, 0.1, 0.9]);
    assert_eq!(
        fired,
        vec![
            (0, TriggerLevel::High),
            (2, TriggerLevel::Low),
            (3, TriggerLevel::High)
        ]
    );
}

#[test]
fn low_refires_once_per_sustain_run_while_idle() {
    let spec = spec(Combine::Max, 0.8, 0.2, 2);
    let fired = run(&spec, &[0.1, 0.1, 0.1, 0.1, 0.5, 0.1, 0.1]);
    assert_eq!(
        fired,
        vec![
            (1, TriggerLevel::Low),
            (3, TriggerLevel::Low),
            (6, TriggerLevel::Low)
        ]
    );
}

#[test]
fn combiners_do_the_arithmetic() {
    assert_eq!(combine_values(&Combine::Max, &[0.2, 0.7, 0.4]), 0.7);
    assert_eq!(combine_values(&Combine::Mean, &[0.25, 0.75]), 0.5);
    let ws = Combine::WeightedSum(vec![2.0, 4.0]);
    assert_eq!(combine_values(&ws, &[0.5, 0.25]), 2.0);
}

#[test]
fn specs_reject_inverted_bands_and_mismatched_weights() {
    assert!(spec(Combine::Max, 0.2, 0.8, 1).validate().is_err());
    assert!(spec(Combine::WeightedSum(vec![1.0]), 0.8, 0.2, 1)
        .validate()
        .is_err());
    assert!(spec(Combine::Max, 0.8, 0.2, 0).validate().is_err());
    assert!(spec(Combine::Max, 0.8, 0.2, 3).validate().is_ok());
}

proptest! {
    /// Between any two HIGH triggers there is a window strictly below the
    /// low threshold, whatever the input sequence.
    #[test]
    fn highs_are_always_separated_by_a_dip_below_the_band(
        values in proptest::collection::vec(0.0f64..1.0, 1..200),
        sustain in 1u32..4,
    ) {
        let spec = spec(Combine::Max, 0.6, 0.3, sustain);
        let fired = run(&spec, &values);
        let highs: Vec<usize> = fired
            .iter()
            .filter(|(_, l)| *l == TriggerLevel::High)
            .map(|(i, _)| *i)
            .collect();
        for pair in highs.windows(2) {
            let dipped = values[pair[0]..pair[1]].iter().any(|&v| v < 0.3);
            prop_assert!(dipped, "HIGHs at {} and {} without re-arming", pair[0], pair[1]);
        }
        // every HIGH ends `sustain` consecutive windows above the threshold
        for &i in &highs {
            prop_assert!(i + 1 >= sustain as usize);
            for k in 0..sustain as usize {
                prop_assert!(values[i - k] > 0.6);
            }
        }
    }
}
