// SPDX-License-Identifier: Apache-2.0

//! The troubleshooting-graph file format, one statement per line:
//!
//! ```text
//! node <id> = tool <name>(<args>)
//! node <id> = decision {<label>: <expr>, <label>: <expr>, ...}
//! node <id> = sink "<verdict>"
//! edge <from>[:<label>] -> <to>
//! ```
//!
//! `#` starts a comment. The first node is the entry point. Decision
//! branches are guards tried in declaration order; `else` is always true.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::TsgError;
use crate::expr::Expr;

#[derive(Clone, Debug, PartialEq)]
pub enum TsgNode {
    Tool { name: String, args: Vec<String> },
    /// Ordered (label, guard) pairs; the first true guard wins.
    Decision { branches: Vec<(String, Expr)> },
    Sink { verdict: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TsgEdge {
    pub from: String,
    pub label: Option<String>,
    pub to: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tsg {
    pub nodes: BTreeMap<String, TsgNode>,
    pub edges: Vec<TsgEdge>,
    pub entry: String,
}

impl Tsg {
    pub fn node(&self, id: &str) -> Option<&TsgNode> {
        self.nodes.get(id)
    }

    pub fn out_edges(&self, id: &str) -> Vec<&TsgEdge> {
        self.edges.iter().filter(|e| e.from == id).collect()
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars().next().unwrap().is_ascii_alphabetic()
        && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Splits on `sep` at bracket depth zero (`()` and `[]` nest).
fn split_top_level(text: &str, sep: char) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            parts.push(cur.trim().to_string());
            cur.clear();
        } else {
            cur.push(c);
        }
    }
    if !cur.trim().is_empty() || !parts.is_empty() {
        parts.push(cur.trim().to_string());
    }
    parts
}

fn parse_node_line(line: usize, rest: &str) -> Result<(String, TsgNode), TsgError> {
    let err = |msg: String| TsgError::Parse { line, msg };
    let (id, def) = rest
        .split_once('=')
        .ok_or_else(|| err("node line needs `<id> = <definition>`".into()))?;
    let id = id.trim().to_string();
    if !is_ident(&id) {
        return Err(err(format!("bad node id {id:?}")));
    }
    let def = def.trim();

    if let Some(tool) = def.strip_prefix("tool ") {
        let tool = tool.trim();
        let open = tool
            .find('(')
            .ok_or_else(|| err("tool definition needs `name(args)`".into()))?;
        if !tool.ends_with(')') {
            return Err(err("unterminated tool argument list".into()));
        }
        let name = tool[..open].trim().to_string();
        if !is_ident(&name) {
            return Err(err(format!("bad tool name {name:?}")));
        }
        let inner = &tool[open + 1..tool.len() - 1];
        let args = if inner.trim().is_empty() {
            Vec::new()
        } else {
            split_top_level(inner, ',')
        };
        return Ok((id, TsgNode::Tool { name, args }));
    }

    if let Some(body) = def.strip_prefix("decision") {
        let body = body.trim();
        let inner = body
            .strip_prefix('{')
            .and_then(|b| b.strip_suffix('}'))
            .ok_or_else(|| err("decision body must be `{label: expr, ...}`".into()))?;
        let mut branches = Vec::new();
        for part in split_top_level(inner, ',') {
            let (label, guard) = part
                .split_once(':')
                .ok_or_else(|| err(format!("branch {part:?} needs `label: expr`")))?;
            let label = label.trim().to_string();
            if !is_ident(&label) {
                return Err(err(format!("bad branch label {label:?}")));
            }
            let guard = Expr::parse(guard.trim())
                .map_err(|msg| err(format!("branch {label:?}: {msg}")))?;
            branches.push((label, guard));
        }
        if branches.is_empty() {
            return Err(err("decision with no branches".into()));
        }
        return Ok((id, TsgNode::Decision { branches }));
    }

    if let Some(verdict) = def.strip_prefix("sink") {
        let verdict = verdict.trim();
        let inner = verdict
            .strip_prefix('"')
            .and_then(|v| v.strip_suffix('"'))
            .ok_or_else(|| err("sink verdict must be double-quoted".into()))?;
        if inner.is_empty() {
            return Err(err("empty sink verdict".into()));
        }
        return Ok((id, TsgNode::Sink { verdict: inner.to_string() }));
    }

    Err(err(format!("unknown node definition {def:?}")))
}

fn parse_edge_line(line: usize, rest: &str) -> Result<TsgEdge, TsgError> {
    let err = |msg: String| TsgError::Parse { line, msg };
    let (lhs, to) = rest
        .split_once("->")
        .ok_or_else(|| err("edge line needs `from -> to`".into()))?;
    let to = to.trim().to_string();
    let lhs = lhs.trim();
    let (from, label) = match lhs.split_once(':') {
        Some((f, l)) => (f.trim().to_string(), Some(l.trim().to_string())),
        None => (lhs.to_string(), None),
    };
    if !is_ident(&from) || !is_ident(&to) {
        return Err(err(format!("bad edge endpoints {lhs:?} -> {to:?}")));
    }
    if let Some(l) = &label {
        if !is_ident(l) {
            return Err(err(format!("bad branch label {l:?}")));
        }
    }
    Ok(TsgEdge { from, label, to })
}

/// Parses and validates a troubleshooting graph: acyclic, decision
/// out-edges labeled per branch, every reachable path ending in a sink.
pub fn parse_tsg(text: &str) -> Result<Tsg, TsgError> {
    let mut nodes = BTreeMap::new();
    let mut order = Vec::new();
    let mut edges = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        // strip comments outside the quoted region
        let code = match raw.find('#') {
            Some(pos) if raw[..pos].matches('"').count() % 2 == 0 => &raw[..pos],
            _ => raw,
        };
        let code = code.trim();
        if code.is_empty() {
            continue;
        }
        if let Some(rest) = code.strip_prefix("node ") {
            let (id, node) = parse_node_line(line, rest)?;
            if nodes.insert(id.clone(), node).is_some() {
                return Err(TsgError::Parse {
                    line,
                    msg: format!("duplicate node id {id:?}"),
                });
            }
            order.push(id);
        } else if let Some(rest) = code.strip_prefix("edge ") {
            edges.push(parse_edge_line(line, rest)?);
        } else {
            return Err(TsgError::Parse {
                line,
                msg: format!("expected `node` or `edge`, found {code:?}"),
            });
        }
    }

    let entry = order
        .first()
        .cloned()
        .ok_or_else(|| TsgError::Structure("no nodes defined".into()))?;
    let tsg = Tsg { nodes, edges, entry };
    validate(&tsg)?;
    Ok(tsg)
}

fn validate(tsg: &Tsg) -> Result<(), TsgError> {
    for e in &tsg.edges {
        for end in [&e.from, &e.to] {
            if !tsg.nodes.contains_key(end) {
                return Err(TsgError::Structure(format!(
                    "edge references unknown node {end:?}"
                )));
            }
        }
    }

    for (id, node) in &tsg.nodes {
        let out = tsg.out_edges(id);
        match node {
            TsgNode::Tool { .. } => {
                if out.len() != 1 {
                    return Err(TsgError::Structure(format!(
                        "tool {id:?} needs exactly one out-edge, has {}",
                        out.len()
                    )));
                }
                if out[0].label.is_some() {
                    return Err(TsgError::Structure(format!(
                        "tool {id:?} out-edge must be unlabeled"
                    )));
                }
            }
            TsgNode::Decision { branches } => {
                let mut labels = BTreeSet::new();
                for e in &out {
                    let label = e
                        .label
                        .as_ref()
                        .ok_or_else(|| TsgError::UnlabeledBranch { node: id.clone() })?;
                    if !labels.insert(label.clone()) {
                        return Err(TsgError::Structure(format!(
                            "decision {id:?}: duplicate out-edge label {label:?}"
                        )));
                    }
                }
                for (label, _) in branches {
                    if !labels.contains(label) {
                        return Err(TsgError::Structure(format!(
                            "decision {id:?}: branch {label:?} has no out-edge"
                        )));
                    }
                }
                for label in &labels {
                    if !branches.iter().any(|(l, _)| l == label) {
                        return Err(TsgError::Structure(format!(
                            "decision {id:?}: out-edge label {label:?} has no branch"
                        )));
                    }
                }
            }
            TsgNode::Sink { .. } => {
                if !out.is_empty() {
                    return Err(TsgError::Structure(format!(
                        "sink {id:?} must be terminal"
                    )));
                }
            }
        }
    }

    // DFS three-color cycle check over the whole edge set
    #[derive(Clone, Copy, PartialEq)]
    enum Color {
        White,
        Grey,
        Black,
    }
    let mut color: BTreeMap<&String, Color> =
        tsg.nodes.keys().map(|k| (k, Color::White)).collect();
    fn dfs<'a>(
        tsg: &'a Tsg,
        at: &'a String,
        color: &mut BTreeMap<&'a String, Color>,
    ) -> Result<(), TsgError> {
        color.insert(at, Color::Grey);
        for e in tsg.out_edges(at) {
            match color[&e.to] {
                Color::Grey => return Err(TsgError::Cycle { node: e.to.clone() }),
                Color::White => dfs(tsg, &e.to, color)?,
                Color::Black => {}
            }
        }
        color.insert(at, Color::Black);
        Ok(())
    }
    for id in tsg.nodes.keys() {
        if color[id] == Color::White {
            dfs(tsg, id, &mut color)?;
        }
    }
    Ok(())
}
