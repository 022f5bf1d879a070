// SPDX-License-Identifier: Apache-2.0

//! Serialization of batch verification results: a deterministic JSON
//! document with per-policy verdicts, and a timing CSV kept separate so the
//! JSON stays byte-identical across runs.

use std::fmt::Write as _;

use crate::engine::BatchReport;

/// Renders the report as pretty JSON. Timings are excluded, so two runs
/// over the same graph and policies produce identical bytes.
pub fn report_to_json(report: &BatchReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

/// Renders per-policy wall-clock timings as `policy_id,kind,holds,elapsed_ms`.
/// Policy ids are positional (row order matches the input policy list).
pub fn timings_to_csv(report: &BatchReport) -> String {
    let mut out = String::from("policy_id,kind,holds,elapsed_ms\n");
    for (i, item) in report.items.iter().enumerate() {
        let kind = match item.policy.kind {
            crate::policy::PolicyKind::Reachability => "REACHABILITY",
            crate::policy::PolicyKind::Isolation => "ISOLATION",
        };
        let (holds, ms) = match &item.verdict {
            Some(v) => (v.holds.to_string(), v.elapsed_ms),
            None => ("error".to_string(), 0.0),
        };
        writeln!(out, "{i},{kind},{holds},{ms:.3}").unwrap();
    }
    out
}
