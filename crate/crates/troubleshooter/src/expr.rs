// SPDX-License-Identifier: Apache-2.0

//! The guard-expression language of decision nodes: numeric comparisons and
//! arithmetic, `min`/`max`/`mean`/`stdev` over lists, and `and`/`or`/`not`.
//! Variables are bound to upstream tool outputs at evaluation time.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::TsgError;

/// A runtime value: tool metrics are numbers or lists of numbers; guards
/// evaluate to booleans.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Num(f64),
    List(Vec<f64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Bool(b) => write!(f, "{b}"),
            Value::Num(x) => write!(f, "{x}"),
            Value::List(xs) => {
                write!(f, "[")?;
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

pub type Bindings = BTreeMap<String, Value>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Gt,
    Lt,
    Ge,
    Le,
    Eq,
    Ne,
    And,
    Or,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Func {
    Min,
    Max,
    Mean,
    Stdev,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    node: ExprNode,
    /// Original text, kept for error messages and round-trip display.
    text: String,
}

#[derive(Clone, Debug, PartialEq)]
enum ExprNode {
    Num(f64),
    Bool(bool),
    Var(String),
    List(Vec<ExprNode>),
    Neg(Box<ExprNode>),
    Not(Box<ExprNode>),
    Binary(BinOp, Box<ExprNode>, Box<ExprNode>),
    Call(Func, Vec<ExprNode>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(&'static str),
}

fn tokenize(text: &str) -> Result<Vec<Tok>, String> {
    let mut toks = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse::<f64>().map_err(|_| format!("bad number {s:?}"))?;
                toks.push(Tok::Num(n));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                toks.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            '>' | '<' | '=' | '!' => {
                let two = i + 1 < chars.len() && chars[i + 1] == '=';
                let sym = match (c, two) {
                    ('>', true) => ">=",
                    ('>', false) => ">",
                    ('<', true) => "<=",
                    ('<', false) => "<",
                    ('=', true) => "==",
                    ('!', true) => "!=",
                    ('=', false) => return Err("single '=' (use '==')".into()),
                    ('!', false) => return Err("single '!' (use 'not')".into()),
                    _ => unreachable!(),
                };
                toks.push(Tok::Sym(sym));
                i += if two { 2 } else { 1 };
            }
            '+' => {
                toks.push(Tok::Sym("+"));
                i += 1;
            }
            '-' => {
                toks.push(Tok::Sym("-"));
                i += 1;
            }
            '*' => {
                toks.push(Tok::Sym("*"));
                i += 1;
            }
            '/' => {
                toks.push(Tok::Sym("/"));
                i += 1;
            }
            '(' => {
                toks.push(Tok::Sym("("));
                i += 1;
            }
            ')' => {
                toks.push(Tok::Sym(")"));
                i += 1;
            }
            '[' => {
                toks.push(Tok::Sym("["));
                i += 1;
            }
            ']' => {
                toks.push(Tok::Sym("]"));
                i += 1;
            }
            ',' => {
                toks.push(Tok::Sym(","));
                i += 1;
            }
            other => return Err(format!("unexpected character {other:?}")),
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_sym(&mut self, sym: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Sym(s)) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), String> {
        if self.eat_sym(sym) {
            Ok(())
        } else {
            Err(format!("expected {sym:?}, found {:?}", self.peek()))
        }
    }

    // or_expr := and_expr ("or" and_expr)*
    fn or_expr(&mut self) -> Result<ExprNode, String> {
        let mut lhs = self.and_expr()?;
        while self.eat_ident("or") {
            let rhs = self.and_expr()?;
            lhs = ExprNode::Binary(BinOp::Or, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> Result<ExprNode, String> {
        let mut lhs = self.not_expr()?;
        while self.eat_ident("and") {
            let rhs = self.not_expr()?;
            lhs = ExprNode::Binary(BinOp::And, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn not_expr(&mut self) -> Result<ExprNode, String> {
        if self.eat_ident("not") {
            Ok(ExprNode::Not(Box::new(self.not_expr()?)))
        } else {
            self.cmp_expr()
        }
    }

    // cmp_expr := add_expr (cmp add_expr)?  — comparisons do not chain
    fn cmp_expr(&mut self) -> Result<ExprNode, String> {
        let lhs = self.add_expr()?;
        let op = match self.peek() {
            Some(Tok::Sym(">")) => BinOp::Gt,
            Some(Tok::Sym("<")) => BinOp::Lt,
            Some(Tok::Sym(">=")) => BinOp::Ge,
            Some(Tok::Sym("<=")) => BinOp::Le,
            Some(Tok::Sym("==")) => BinOp::Eq,
            Some(Tok::Sym("!=")) => BinOp::Ne,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        let rhs = self.add_expr()?;
        Ok(ExprNode::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    fn add_expr(&mut self) -> Result<ExprNode, String> {
        let mut lhs = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym("+")) => BinOp::Add,
                Some(Tok::Sym("-")) => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.mul_expr()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn mul_expr(&mut self) -> Result<ExprNode, String> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Sym("*")) => BinOp::Mul,
                Some(Tok::Sym("/")) => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = ExprNode::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<ExprNode, String> {
        if self.eat_sym("-") {
            Ok(ExprNode::Neg(Box::new(self.unary()?)))
        } else {
            self.primary()
        }
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(s)) if s == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn primary(&mut self) -> Result<ExprNode, String> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(ExprNode::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "true" | "else" => return Ok(ExprNode::Bool(true)),
                    "false" => return Ok(ExprNode::Bool(false)),
                    _ => {}
                }
                let func = match name.as_str() {
                    "min" => Some(Func::Min),
                    "max" => Some(Func::Max),
                    "mean" => Some(Func::Mean),
                    "stdev" => Some(Func::Stdev),
                    _ => None,
                };
                if self.eat_sym("(") {
                    let func = func.ok_or(format!("unknown function {name:?}"))?;
                    let mut args = Vec::new();
                    if !self.eat_sym(")") {
                        loop {
                            args.push(self.or_expr()?);
                            if self.eat_sym(")") {
                                break;
                            }
                            self.expect_sym(",")?;
                        }
                    }
                    Ok(ExprNode::Call(func, args))
                } else if func.is_some() {
                    Err(format!("function {name:?} needs arguments"))
                } else {
                    Ok(ExprNode::Var(name))
                }
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let inner = self.or_expr()?;
                self.expect_sym(")")?;
                Ok(inner)
            }
            Some(Tok::Sym("[")) => {
                self.pos += 1;
                let mut items = Vec::new();
                if !self.eat_sym("]") {
                    loop {
                        items.push(self.or_expr()?);
                        if self.eat_sym("]") {
                            break;
                        }
                        self.expect_sym(",")?;
                    }
                }
                Ok(ExprNode::List(items))
            }
            other => Err(format!("expected a value, found {other:?}")),
        }
    }
}

impl Expr {
    pub fn parse(text: &str) -> Result<Expr, String> {
        let toks = tokenize(text)?;
        if toks.is_empty() {
            return Err("empty expression".into());
        }
        let mut p = Parser { toks, pos: 0 };
        let node = p.or_expr()?;
        if p.pos != p.toks.len() {
            return Err(format!("trailing input at token {:?}", p.toks[p.pos]));
        }
        Ok(Expr { node, text: text.trim().to_string() })
    }

    pub fn eval(&self, bindings: &Bindings) -> Result<Value, TsgError> {
        eval_node(&self.node, bindings).map_err(|msg| TsgError::ExprType {
            expr: self.text.clone(),
            msg,
        })
    }

    /// Evaluates as a guard; non-boolean results are type errors.
    pub fn eval_bool(&self, bindings: &Bindings) -> Result<bool, TsgError> {
        match self.eval(bindings)? {
            Value::Bool(b) => Ok(b),
            other => Err(TsgError::ExprType {
                expr: self.text.clone(),
                msg: format!("guard evaluated to {other}, not a boolean"),
            }),
        }
    }

    /// Every variable the expression reads, for parse-time diagnostics.
    pub fn variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        collect_vars(&self.node, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

fn collect_vars(node: &ExprNode, out: &mut Vec<String>) {
    match node {
        ExprNode::Var(v) => out.push(v.clone()),
        ExprNode::Neg(a) | ExprNode::Not(a) => collect_vars(a, out),
        ExprNode::Binary(_, a, b) => {
            collect_vars(a, out);
            collect_vars(b, out);
        }
        ExprNode::Call(_, args) | ExprNode::List(args) => {
            for a in args {
                collect_vars(a, out);
            }
        }
        ExprNode::Num(_) | ExprNode::Bool(_) => {}
    }
}

fn num(v: Value) -> Result<f64, String> {
    match v {
        Value::Num(x) => Ok(x),
        other => Err(format!("expected a number, got {other}")),
    }
}

fn boolean(v: Value) -> Result<bool, String> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(format!("expected a boolean, got {other}")),
    }
}

/// Flattens call arguments: a single list argument or any mix of numbers
/// and lists.
fn list_args(args: &[ExprNode], bindings: &Bindings) -> Result<Vec<f64>, String> {
    let mut xs = Vec::new();
    for a in args {
        match eval_node(a, bindings)? {
            Value::Num(x) => xs.push(x),
            Value::List(mut l) => xs.append(&mut l),
            Value::Bool(_) => return Err("a boolean has no magnitude".into()),
        }
    }
    if xs.is_empty() {
        return Err("aggregate of an empty list".into());
    }
    Ok(xs)
}

fn eval_node(node: &ExprNode, bindings: &Bindings) -> Result<Value, String> {
    Ok(match node {
        ExprNode::Num(x) => Value::Num(*x),
        ExprNode::Bool(b) => Value::Bool(*b),
        ExprNode::Var(name) => bindings
            .get(name)
            .cloned()
            .ok_or(format!("unknown variable {name:?}"))?,
        ExprNode::List(items) => {
            let mut xs = Vec::with_capacity(items.len());
            for it in items {
                xs.push(num(eval_node(it, bindings)?)?);
            }
            Value::List(xs)
        }
        ExprNode::Neg(a) => Value::Num(-num(eval_node(a, bindings)?)?),
        ExprNode::Not(a) => Value::Bool(!boolean(eval_node(a, bindings)?)?),
        ExprNode::Binary(op, a, b) => match op {
            BinOp::And => {
                // short-circuit, still type-checking the left side first
                if !boolean(eval_node(a, bindings)?)? {
                    Value::Bool(false)
                } else {
                    Value::Bool(boolean(eval_node(b, bindings)?)?)
                }
            }
            BinOp::Or => {
                if boolean(eval_node(a, bindings)?)? {
                    Value::Bool(true)
                } else {
                    Value::Bool(boolean(eval_node(b, bindings)?)?)
                }
            }
            _ => {
                let x = num(eval_node(a, bindings)?)?;
                let y = num(eval_node(b, bindings)?)?;
                match op {
                    BinOp::Add => Value::Num(x + y),
                    BinOp::Sub => Value::Num(x - y),
                    BinOp::Mul => Value::Num(x * y),
                    BinOp::Div => {
                        if y == 0.0 {
                            return Err("division by zero".into());
                        }
                        Value::Num(x / y)
                    }
                    BinOp::Gt => Value::Bool(x > y),
                    BinOp::Lt => Value::Bool(x < y),
                    BinOp::Ge => Value::Bool(x >= y),
                    BinOp::Le => Value::Bool(x <= y),
                    BinOp::Eq => Value::Bool(x == y),
                    BinOp::Ne => Value::Bool(x != y),
                    BinOp::And | BinOp::Or => unreachable!(),
                }
            }
        },
        ExprNode::Call(func, args) => {
            let xs = list_args(args, bindings)?;
            let n = xs.len() as f64;
            let v = match func {
                Func::Min => xs.iter().copied().fold(f64::INFINITY, f64::min),
                Func::Max => xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                Func::Mean => xs.iter().sum::<f64>() / n,
                Func::Stdev => {
                    // population standard deviation
                    let mean = xs.iter().sum::<f64>() / n;
                    (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
                }
            };
            Value::Num(v)
        }
    })
}

/// Evaluates a standalone expression text against bindings — the decision
/// primitive used by decision nodes and exposed for direct use.
pub fn decision_eval(expr: &str, bindings: &Bindings) -> Result<Value, TsgError> {
    let parsed = Expr::parse(expr).map_err(|msg| TsgError::ExprType {
        expr: expr.to_string(),
        msg,
    })?;
    parsed.eval(bindings)
}
