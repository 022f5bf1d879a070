// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TsgError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("cycle through node {node}")]
    Cycle { node: String },
    #[error("decision {node}: out-edge without a branch label")]
    UnlabeledBranch { node: String },
    #[error("graph structure: {0}")]
    Structure(String),
    #[error("symbolic reference {name:?} does not resolve in this graph")]
    UnresolvedReference { name: String },
    #[error("unknown tool {name:?}")]
    UnknownTool { name: String },
    #[error("tool {tool}: bad arguments: {msg}")]
    BadArgs { tool: String, msg: String },
    #[error("expression `{expr}`: {msg}")]
    ExprType { expr: String, msg: String },
    #[error("decision {node}: no branch guard matched")]
    NoBranch { node: String },
    #[error("snapshot: {0}")]
    Snapshot(String),
}
