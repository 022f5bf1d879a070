// SPDX-License-Identifier: Apache-2.0

//! Executing a troubleshooting graph: walk from the entry node, run tools,
//! bind their metrics, take the first matching decision branch, stop at a
//! sink. The traversal itself is the diagnosis.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TsgError;
use crate::expr::Bindings;
use crate::handle::SimHandle;
use crate::parse::{Tsg, TsgNode};
use crate::tools::{tool_adapter, ToolResult};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum StepAction {
    Tool(ToolResult),
    Decision { chose: String },
    Sink { verdict: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Step {
    pub node: String,
    pub action: StepAction,
}

/// The ordered trace of an automated troubleshooting run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnosis {
    pub steps: Vec<Step>,
    pub verdict: String,
}

impl Diagnosis {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("diagnosis serializes");
        s.push('\n');
        s
    }
}

impl fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for step in &self.steps {
            match &step.action {
                StepAction::Tool(r) => writeln!(f, "[{}] {}: {}", step.node, r.tool, r.raw)?,
                StepAction::Decision { chose } => {
                    writeln!(f, "[{}] decision -> {chose}", step.node)?
                }
                StepAction::Sink { verdict } => writeln!(f, "[{}] verdict: {verdict}", step.node)?,
            }
        }
        Ok(())
    }
}

/// Runs the graph against the handle. Tools execute in path order; every
/// node runs at most once; the walk ends at exactly one sink.
pub fn run_tsg(tsg: &Tsg, sim: &mut SimHandle) -> Result<Diagnosis, TsgError> {
    let mut steps = Vec::new();
    let mut env = Bindings::new();
    let mut visited = BTreeSet::new();
    let mut at = tsg.entry.clone();

    loop {
        if !visited.insert(at.clone()) {
            // unreachable on validated graphs; defensive stop
            return Err(TsgError::Cycle { node: at });
        }
        let node = tsg
            .node(&at)
            .ok_or_else(|| TsgError::Structure(format!("missing node {at:?}")))?;
        match node {
            TsgNode::Tool { name, args } => {
                let result = tool_adapter(name, args, sim)?;
                for (k, v) in &result.values {
                    env.insert(k.clone(), v.clone());
                }
                steps.push(Step { node: at.clone(), action: StepAction::Tool(result) });
                at = tsg.out_edges(&at)[0].to.clone();
            }
            TsgNode::Decision { branches } => {
                let mut chosen = None;
                for (label, guard) in branches {
                    if guard.eval_bool(&env)? {
                        chosen = Some(label.clone());
                        break;
                    }
                }
                let label = chosen.ok_or_else(|| TsgError::NoBranch { node: at.clone() })?;
                steps.push(Step {
                    node: at.clone(),
                    action: StepAction::Decision { chose: label.clone() },
                });
                at = tsg
                    .out_edges(&at)
                    .iter()
                    .find(|e| e.label.as_deref() == Some(label.as_str()))
                    .expect("validated: every branch label has an edge")
                    .to
                    .clone();
            }
            TsgNode::Sink { verdict } => {
                steps.push(Step {
                    node: at.clone(),
                    action: StepAction::Sink { verdict: verdict.clone() },
                });
                return Ok(Diagnosis { steps, verdict: verdict.clone() });
            }
        }
    }
}
