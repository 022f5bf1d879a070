// SPDX-License-Identifier: Apache-2.0

//! Symbolic verification of forwarding-graph policies.
//!
//! Reachability and isolation between endpoint pairs are decided by pushing
//! packet classes through every extracted service chain with the VNF
//! transfer functions, branching where a function may take more than one
//! action. Reachability verdicts carry a concrete witness packet replayed
//! backward through the chain; isolation verdicts can name the VNF that
//! absorbs the traffic. An independent brute-force oracle over small header
//! domains backs the engine's answers in tests.

pub mod engine;
pub mod oracle;
pub mod policy;
pub mod report;
pub mod testgen;

pub use engine::{
    check_isolation, check_reachability, root_cause_isolation, verify_policy_set, BatchItem,
    BatchReport, BatchSummary, KindStats,
};
pub use oracle::{oracle_reachability, trace_packet, Terminal, Trace};
pub use policy::{
    policies_from_json, policies_to_json, Cause, Policy, PolicyKind, Verdict, VerifyError, Witness,
};
pub use report::{report_to_json, timings_to_csv};
pub use testgen::{generate_case, vcpe_small, GeneratedCase};
