// SPDX-License-Identifier: Apache-2.0

//! Windowed rate monitoring. Raw per-tick samples are collapsed into one
//! estimate per window — mean, unbiased variance, and the probability that
//! the instantaneous rate exceeds a capacity threshold under a Gaussian
//! model — so the volume crossing the monitoring plane drops by the window
//! size.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Samples per estimate. At the 100 Hz tick rate this yields one estimate
/// per link per second.
pub const DEFAULT_WINDOW: usize = 100;

/// One rate observation on a link, taken at a simulation tick (10 ms).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateSample {
    pub link_id: String,
    pub timestamp: u64,
    /// Observed rate in Mbit/s; never negative.
    pub mbps: f64,
}

/// The per-window digest a monitor publishes instead of raw samples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateEstimate {
    pub link_id: String,
    pub window_start: u64,
    pub window_end: u64,
    pub mean: f64,
    pub variance: f64,
    /// P(rate > capacity) for a Normal(mean, variance) rate model.
    pub risk: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum RateMonError {
    #[error("window holds {got} samples, the configured size is {want}")]
    ShortWindow { got: usize, want: usize },
    #[error("sample timestamps on {link_id} must increase: {prev} then {next}")]
    NonMonotonic { link_id: String, prev: u64, next: u64 },
}

/// Gaussian upper-tail probability of exceeding `capacity`. A degenerate
/// window (zero variance) pins the whole mass at the mean.
fn tail_risk(mean: f64, variance: f64, capacity: f64) -> f64 {
    if variance <= 0.0 {
        return if mean > capacity { 1.0 } else { 0.0 };
    }
    let normal = Normal::new(mean, variance.sqrt()).expect("positive variance");
    normal.sf(capacity).clamp(0.0, 1.0)
}

/// Collapses exactly `want` samples into one estimate against `capacity`.
pub fn ratemon_update(
    window: &[RateSample],
    want: usize,
    capacity: f64,
) -> Result<RateEstimate, RateMonError> {
    debug_assert!(capacity > 0.0);
    if window.len() != want || window.is_empty() {
        return Err(RateMonError::ShortWindow {
            got: window.len(),
            want,
        });
    }
    for pair in window.windows(2) {
        if pair[1].timestamp <= pair[0].timestamp {
            return Err(RateMonError::NonMonotonic {
                link_id: pair[1].link_id.clone(),
                prev: pair[0].timestamp,
                next: pair[1].timestamp,
            });
        }
    }
    let n = window.len();
    let mean = window.iter().map(|s| s.mbps).sum::<f64>() / n as f64;
    let variance = if n < 2 {
        0.0
    } else {
        window.iter().map(|s| (s.mbps - mean).powi(2)).sum::<f64>() / (n - 1) as f64
    };
    Ok(RateEstimate {
        link_id: window[0].link_id.clone(),
        window_start: window[0].timestamp,
        window_end: window[n - 1].timestamp,
        mean,
        variance,
        risk: tail_risk(mean, variance, capacity),
        n,
    })
}

/// A stateful monitor for one link: buffers per-tick samples and emits one
/// estimate every `window` samples.
#[derive(Clone, Debug)]
pub struct RateMon {
    pub link_id: String,
    pub window: usize,
    pub capacity: f64,
    buf: Vec<RateSample>,
    last_ts: Option<u64>,
}

impl RateMon {
    pub fn new(link_id: impl Into<String>, window: usize, capacity: f64) -> Self {
        assert!(window >= 1 && capacity > 0.0);
        RateMon {
            link_id: link_id.into(),
            window,
            capacity,
            buf: Vec::with_capacity(window),
            last_ts: None,
        }
    }

    /// Buffers one sample; yields an estimate when the window fills.
    pub fn push(&mut self, timestamp: u64, mbps: f64) -> Result<Option<RateEstimate>, RateMonError> {
        if let Some(prev) = self.last_ts {
            if timestamp <= prev {
                return Err(RateMonError::NonMonotonic {
                    link_id: self.link_id.clone(),
                    prev,
                    next: timestamp,
                });
            }
        }
        self.last_ts = Some(timestamp);
        self.buf.push(RateSample {
            link_id: self.link_id.clone(),
            timestamp,
            mbps: mbps.max(0.0),
        });
        if self.buf.len() < self.window {
            return Ok(None);
        }
        let est = ratemon_update(&self.buf, self.window, self.capacity)?;
        self.buf.clear();
        Ok(Some(est))
    }

    pub fn pending(&self) -> usize {
        self.buf.len()
    }
}
