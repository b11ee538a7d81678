//! Boolean operation probe: expressions over an operator alphabet bound to
//! task or contrast truth tables.

mod suite;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dataset::SubProbe;

pub use suite::{build_logic_suite, contrast_rebind, LogicCounts, LogicSuiteConfig};

/// Outputs for `(left, right)` = (F,F), (F,T), (T,F), (T,T).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TruthTable(pub [bool; 4]);

impl TruthTable {
    pub fn apply(self, l: bool, r: bool) -> bool {
        self.0[usize::from(l) * 2 + usize::from(r)]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Operation {
    Conjunction,
    AlternativeDenial,
    Disjunction,
    JointDenial,
    MaterialNonImplication,
    MaterialImplication,
    ConverseNonImplication,
    ConverseImplication,
}

impl Operation {
    pub fn table(self) -> TruthTable {
        let f = |g: fn(bool, bool) -> bool| {
            TruthTable([
                g(false, false),
                g(false, true),
                g(true, false),
                g(true, true),
            ])
        };
        match self {
            Operation::Conjunction => f(|l, r| l && r),
            Operation::AlternativeDenial => f(|l, r| !(l && r)),
            Operation::Disjunction => f(|l, r| l || r),
            Operation::JointDenial => f(|l, r| !(l || r)),
            Operation::MaterialNonImplication => f(|l, r| l && !r),
            Operation::MaterialImplication => f(|l, r| !l || r),
            Operation::ConverseNonImplication => f(|l, r| !l && r),
            Operation::ConverseImplication => f(|l, r| l || !r),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BindingKind {
    Task,
    Contrast,
}

/// Operator symbols and what they mean in the task and contrast settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorBinding {
    pub alphabet: Vec<String>,
    pub task: BTreeMap<String, Operation>,
    pub contrast: BTreeMap<String, Operation>,
}

impl Default for OperatorBinding {
    fn default() -> Self {
        use Operation::*;
        let alphabet: Vec<String> = ["a1", "b2", "c3", "d4"].map(String::from).to_vec();
        let task = [Conjunction, AlternativeDenial, Disjunction, JointDenial];
        let contrast = [
            MaterialNonImplication,
            MaterialImplication,
            ConverseNonImplication,
            ConverseImplication,
        ];
        OperatorBinding {
            task: alphabet.iter().cloned().zip(task).collect(),
            contrast: alphabet.iter().cloned().zip(contrast).collect(),
            alphabet,
        }
    }
}

impl OperatorBinding {
    pub fn operation(&self, symbol: &str, kind: BindingKind) -> Option<Operation> {
        match kind {
            BindingKind::Task => self.task.get(symbol),
            BindingKind::Contrast => self.contrast.get(symbol),
        }
        .copied()
    }

    /// Symbol whose task meaning is the operation probed by `sub`.
    pub fn symbol_for_sub_probe(&self, sub: SubProbe) -> Option<&str> {
        let op = match sub {
            SubProbe::Conj => Operation::Conjunction,
            SubProbe::Alt => Operation::AlternativeDenial,
            SubProbe::Disc => Operation::Disjunction,
            SubProbe::Joi => Operation::JointDenial,
            _ => return None,
        };
        self.task
            .iter()
            .find(|(_, o)| **o == op)
            .map(|(s, _)| s.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },
    #[error("unknown operator {0:?}")]
    UnknownOperator(String),
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("line {line}: {source}")]
    Line {
        line: usize,
        #[source]
        source: Box<LogicError>,
    },
    #[error("invalid config: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum LogicExpr {
    Lit(bool),
    Op {
        op: String,
        left: Box<LogicExpr>,
        right: Box<LogicExpr>,
    },
}

fn lit_str(b: bool) -> &'static str {
    if b {
        "True"
    } else {
        "False"
    }
}

impl LogicExpr {
    pub fn op(op: &str, left: LogicExpr, right: LogicExpr) -> Self {
        LogicExpr::Op {
            op: op.to_string(),
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    pub fn n_ops(&self) -> usize {
        match self {
            LogicExpr::Lit(_) => 0,
            LogicExpr::Op { left, right, .. } => 1 + left.n_ops() + right.n_ops(),
        }
    }

    pub fn operators(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.visit_ops(&mut |o| out.push(o));
        out
    }

    fn visit_ops<'a>(&'a self, f: &mut impl FnMut(&'a str)) {
        if let LogicExpr::Op { op, left, right } = self {
            left.visit_ops(f);
            f(op);
            right.visit_ops(f);
        }
    }

    pub fn evaluate(
        &self,
        binding: &OperatorBinding,
        kind: BindingKind,
    ) -> Result<bool, LogicError> {
        match self {
            LogicExpr::Lit(b) => Ok(*b),
            LogicExpr::Op { op, left, right } => {
                let o = binding
                    .operation(op, kind)
                    .ok_or_else(|| LogicError::UnknownOperator(op.clone()))?;
                let l = left.evaluate(binding, kind)?;
                let r = right.evaluate(binding, kind)?;
                Ok(o.table().apply(l, r))
            }
        }
    }

    /// Every operator node has at least one literal child.
    pub fn is_comb(&self) -> bool {
        match self {
            LogicExpr::Lit(_) => true,
            LogicExpr::Op { left, right, .. } => match (&**left, &**right) {
                (LogicExpr::Lit(_), x) | (x, LogicExpr::Lit(_)) => x.is_comb(),
                _ => false,
            },
        }
    }

    fn write(&self, out: &mut Vec<String>, outer: bool) {
        match self {
            LogicExpr::Lit(b) => out.push(lit_str(*b).into()),
            LogicExpr::Op { op, left, right } => {
                if !outer {
                    out.push("(".into());
                }
                left.write(out, false);
                out.push(op.clone());
                right.write(out, false);
                if !outer {
                    out.push(")".into());
                }
            }
        }
    }
}

/// Fully parenthesized except at the outermost level.
impl fmt::Display for LogicExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut toks = Vec::new();
        self.write(&mut toks, true);
        f.write_str(&toks.join(" "))
    }
}

struct Parser<'a> {
    toks: Vec<(usize, &'a str)>,
    pos: usize,
    end: usize,
    alphabet: &'a [String],
}

impl<'a> Parser<'a> {
    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |t| t.0)
    }

    fn err<T>(&self, message: String) -> Result<T, LogicError> {
        Err(LogicError::Parse {
            offset: self.offset(),
            message,
        })
    }

    fn peek(&self) -> Option<&'a str> {
        self.toks.get(self.pos).map(|t| t.1)
    }

    fn operand(&mut self) -> Result<LogicExpr, LogicError> {
        match self.peek() {
            Some("True") => {
                self.pos += 1;
                Ok(LogicExpr::Lit(true))
            }
            Some("False") => {
                self.pos += 1;
                Ok(LogicExpr::Lit(false))
            }
            Some("(") => {
                self.pos += 1;
                let e = self.binary()?;
                if self.peek() != Some(")") {
                    return self.err("expected )".into());
                }
                self.pos += 1;
                Ok(e)
            }
            Some(t) => self.err(format!("expected True, False or (, found {t:?}")),
            None => self.err("unexpected end of expression".into()),
        }
    }

    fn binary(&mut self) -> Result<LogicExpr, LogicError> {
        let left = self.operand()?;
        let op = match self.peek() {
            Some(t) if self.alphabet.iter().any(|a| a == t) => t,
            Some(t) if !matches!(t, "(" | ")" | "True" | "False") => {
                return Err(LogicError::UnknownOperator(t.to_string()))
            }
            Some(t) => return self.err(format!("expected an operator, found {t:?}")),
            None => return self.err("expected an operator".into()),
        };
        self.pos += 1;
        let right = self.operand()?;
        Ok(LogicExpr::op(op, left, right))
    }
}

fn tokenize(s: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices() {
        if c.is_whitespace() || c == '(' || c == ')' {
            if let Some(st) = start.take() {
                out.push((st, &s[st..i]));
            }
            if !c.is_whitespace() {
                out.push((i, &s[i..i + 1]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(st) = start {
        out.push((st, &s[st..]));
    }
    out
}

pub fn parse_expression(s: &str, alphabet: &[String]) -> Result<LogicExpr, LogicError> {
    let mut p = Parser {
        toks: tokenize(s),
        pos: 0,
        end: s.len(),
        alphabet,
    };
    let e = if p.toks.len() == 1 {
        p.operand()?
    } else {
        p.binary()?
    };
    if p.pos != p.toks.len() {
        return p.err("trailing tokens".into());
    }
    Ok(e)
}

pub fn evaluate_expression(
    s: &str,
    binding: &OperatorBinding,
    kind: BindingKind,
) -> Result<bool, LogicError> {
    parse_expression(s, &binding.alphabet)?.evaluate(binding, kind)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sketch {
    /// Each operator extends the expression at its head or its tail.
    Chain,
    /// A uniformly random bracketing that is not a chain (when one exists).
    Tree,
}

enum Shape {
    Leaf,
    Node(Box<Shape>, Box<Shape>),
}

fn catalan(n: usize) -> Vec<f64> {
    let mut c = vec![1.0; n + 1];
    for i in 1..=n {
        c[i] = (0..i).map(|k| c[k] * c[i - 1 - k]).sum();
    }
    c
}

fn random_shape<R: Rng>(n: usize, cat: &[f64], rng: &mut R) -> Shape {
    if n == 0 {
        return Shape::Leaf;
    }
    let mut u = rng.gen::<f64>() * cat[n];
    let mut k = 0;
    while k + 1 < n {
        let w = cat[k] * cat[n - 1 - k];
        if u < w {
            break;
        }
        u -= w;
        k += 1;
    }
    Shape::Node(
        Box::new(random_shape(k, cat, rng)),
        Box::new(random_shape(n - 1 - k, cat, rng)),
    )
}

fn chain_shape<R: Rng>(n: usize, rng: &mut R) -> Shape {
    let mut s = Shape::Leaf;
    for _ in 0..n {
        s = if rng.gen::<bool>() {
            Shape::Node(Box::new(s), Box::new(Shape::Leaf))
        } else {
            Shape::Node(Box::new(Shape::Leaf), Box::new(s))
        };
    }
    s
}

fn is_comb_shape(s: &Shape) -> bool {
    match s {
        Shape::Leaf => true,
        Shape::Node(l, r) => match (&**l, &**r) {
            (Shape::Leaf, x) | (x, Shape::Leaf) => is_comb_shape(x),
            _ => false,
        },
    }
}

fn fill<R: Rng>(s: &Shape, ops: &mut impl Iterator<Item = String>, rng: &mut R) -> LogicExpr {
    match s {
        Shape::Leaf => LogicExpr::Lit(rng.gen()),
        Shape::Node(l, r) => {
            let left = fill(l, ops, rng);
            let op = ops.next().expect("one operator per node");
            let right = fill(r, ops, rng);
            LogicExpr::op(&op, left, right)
        }
    }
}

/// Draws one expression with `n_ops` operators. Excluded symbols never
/// appear; each required symbol appears at least once.
pub fn sample_expression<R: Rng>(
    sketch: Sketch,
    n_ops: usize,
    alphabet: &[String],
    rng: &mut R,
    exclude: &BTreeSet<String>,
    require: &BTreeSet<String>,
) -> Result<LogicExpr, LogicError> {
    let allowed: Vec<&String> = alphabet.iter().filter(|a| !exclude.contains(*a)).collect();
    if n_ops == 0 {
        return Err(LogicError::Unsatisfiable("n_ops must be at least 1".into()));
    }
    if allowed.is_empty() {
        return Err(LogicError::Unsatisfiable(
            "every operator is excluded".into(),
        ));
    }
    if let Some(r) = require
        .iter()
        .find(|r| exclude.contains(*r) || !alphabet.contains(r))
    {
        return Err(LogicError::Unsatisfiable(format!(
            "required operator {r} is unavailable"
        )));
    }
    if require.len() > n_ops {
        return Err(LogicError::Unsatisfiable(format!(
            "{} required operators but only {n_ops} slots",
            require.len()
        )));
    }
    let shape = match sketch {
        Sketch::Chain => chain_shape(n_ops, rng),
        Sketch::Tree => {
            let cat = catalan(n_ops);
            // Only n_ops >= 3 admits a non-chain bracketing.
            loop {
                let s = random_shape(n_ops, &cat, rng);
                if n_ops < 3 || !is_comb_shape(&s) {
                    break s;
                }
            }
        }
    };
    let mut ops: Vec<String> = (0..n_ops)
        .map(|_| (*allowed.choose(rng).expect("non-empty")).clone())
        .collect();
    let missing: Vec<&String> = require.iter().filter(|r| !ops.contains(r)).collect();
    if !missing.is_empty() {
        let mut slots: Vec<usize> = (0..n_ops).collect();
        slots.shuffle(rng);
        // Keep operators already satisfying a requirement in place.
        let present: BTreeSet<usize> = (0..n_ops).filter(|&i| require.contains(&ops[i])).collect();
        let mut free = slots.into_iter().filter(|i| !present.contains(i));
        for r in missing {
            let i = free
                .next()
                .ok_or_else(|| LogicError::Unsatisfiable("no free slot".into()))?;
            ops[i] = r.clone();
        }
    }
    Ok(fill(&shape, &mut ops.into_iter(), rng))
}

/// A chain-shaped expression with fixed operators in left-to-right order.
pub(crate) fn expression_with_ops<R: Rng>(ops: &[String], rng: &mut R) -> LogicExpr {
    let shape = chain_shape(ops.len(), rng);
    fill(&shape, &mut ops.iter().cloned(), rng)
}
