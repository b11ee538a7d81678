//! Weighted context-free grammars with typed terminal classes.
//!
//! A symbol is a nonterminal iff it is the left-hand side of at least one
//! production. Everything else appearing on a right-hand side is a terminal and
//! must be declared in one of the grammar's terminal classes.

mod enumerate;
mod sample;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use enumerate::{enumerate_language, EnumerateError};
pub use sample::{
    sample_derivation, sample_derivation_with_rng, yield_tokens, Constraints, Derivation,
    DerivationChild, DerivationNode, FeatureSummary, SampleError, FORCED_ATTEMPTS,
    REJECTION_ATTEMPTS,
};

pub const DEFAULT_MAX_ITERATIONS: u32 = 12;
pub const DEFAULT_RECURSION_DAMPING: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SymbolKind {
    #[serde(rename = "terminal")]
    Terminal,
    #[serde(rename = "nonterminal")]
    Nonterminal,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub name: String,
    pub kind: SymbolKind,
}

/// T-productions have only terminals on the right; N-productions have at
/// least one nonterminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProductionKind {
    T,
    N,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Production {
    pub lhs: String,
    pub rhs: Vec<String>,
    pub kind: ProductionKind,
    pub iterative: bool,
    pub weight: f64,
    /// Feature label counted in a derivation's summary whenever the rule fires.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tag: Option<String>,
}

impl Production {
    /// A production whose kind is fixed up when it is added to a [`Pcfg`].
    pub fn new(lhs: &str, rhs: &[&str]) -> Self {
        Production {
            lhs: lhs.to_string(),
            rhs: rhs.iter().map(|s| s.to_string()).collect(),
            kind: ProductionKind::N,
            iterative: false,
            weight: 1.0,
            tag: None,
        }
    }

    pub fn iterative(mut self) -> Self {
        self.iterative = true;
        self
    }

    pub fn weight(mut self, w: f64) -> Self {
        self.weight = w;
        self
    }

    pub fn tagged(mut self, tag: &str) -> Self {
        self.tag = Some(tag.to_string());
        self
    }
}

impl fmt::Display for Production {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs.join(" "))
    }
}

/// On-disk layout of a grammar definition file.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct PcfgFile {
    start: String,
    productions: Vec<Production>,
    classes: BTreeMap<String, Vec<String>>,
    max_iterations: u32,
    max_depth: u32,
    #[serde(default = "default_damping")]
    recursion_damping: f64,
}

fn default_damping() -> f64 {
    DEFAULT_RECURSION_DAMPING
}

#[derive(Debug, thiserror::Error)]
pub enum GrammarIoError {
    #[error("reading grammar {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parsing grammar: {0}")]
    Json(#[from] serde_json::Error),
}

/// A weighted context-free grammar.
///
/// `max_depth` bounds derivation tree height; `max_iterations` bounds how
/// many times iterative productions may fire in one derivation.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(from = "PcfgFile", into = "PcfgFile")]
pub struct Pcfg {
    start: String,
    productions: Vec<Production>,
    classes: BTreeMap<String, Vec<String>>,
    max_iterations: u32,
    max_depth: u32,
    recursion_damping: f64,
    by_lhs: BTreeMap<String, Vec<usize>>,
    min_height: HashMap<String, u32>,
}

impl PartialEq for Pcfg {
    fn eq(&self, other: &Self) -> bool {
        self.start == other.start
            && self.productions == other.productions
            && self.classes == other.classes
            && self.max_iterations == other.max_iterations
            && self.max_depth == other.max_depth
            && self.recursion_damping == other.recursion_damping
    }
}

impl From<PcfgFile> for Pcfg {
    fn from(f: PcfgFile) -> Self {
        let mut g = Pcfg {
            start: f.start,
            productions: f.productions,
            classes: f.classes,
            max_iterations: f.max_iterations,
            max_depth: f.max_depth,
            recursion_damping: f.recursion_damping,
            by_lhs: BTreeMap::new(),
            min_height: HashMap::new(),
        };
        g.reindex();
        g
    }
}

impl From<Pcfg> for PcfgFile {
    fn from(g: Pcfg) -> Self {
        PcfgFile {
            start: g.start,
            productions: g.productions,
            classes: g.classes,
            max_iterations: g.max_iterations,
            max_depth: g.max_depth,
            recursion_damping: g.recursion_damping,
        }
    }
}

impl Pcfg {
    /// Builds a grammar and normalizes each production's T/N kind.
    pub fn new(
        start: &str,
        productions: Vec<Production>,
        classes: BTreeMap<String, Vec<String>>,
        max_depth: u32,
    ) -> Self {
        let mut g = Pcfg {
            start: start.to_string(),
            productions,
            classes,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            max_depth,
            recursion_damping: DEFAULT_RECURSION_DAMPING,
            by_lhs: BTreeMap::new(),
            min_height: HashMap::new(),
        };
        g.reindex();
        g.normalize_kinds();
        g
    }

    pub fn with_max_iterations(mut self, n: u32) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_max_depth(mut self, n: u32) -> Self {
        self.max_depth = n;
        self
    }

    pub fn with_recursion_damping(mut self, d: f64) -> Self {
        self.recursion_damping = d;
        self
    }

    pub fn start(&self) -> &str {
        &self.start
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn production(&self, idx: usize) -> &Production {
        &self.productions[idx]
    }

    pub fn classes(&self) -> &BTreeMap<String, Vec<String>> {
        &self.classes
    }

    pub fn max_iterations(&self) -> u32 {
        self.max_iterations
    }

    pub fn max_depth(&self) -> u32 {
        self.max_depth
    }

    pub fn recursion_damping(&self) -> f64 {
        self.recursion_damping
    }

    pub fn is_nonterminal(&self, sym: &str) -> bool {
        self.by_lhs.contains_key(sym)
    }

    pub fn symbol(&self, name: &str) -> Symbol {
        let kind = if self.is_nonterminal(name) {
            SymbolKind::Nonterminal
        } else {
            SymbolKind::Terminal
        };
        Symbol {
            name: name.to_string(),
            kind,
        }
    }

    /// Indices of the productions expanding `lhs`, in file order.
    pub fn productions_for(&self, lhs: &str) -> &[usize] {
        self.by_lhs.get(lhs).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = &str> {
        self.by_lhs.keys().map(String::as_str)
    }

    /// All terminals used on some right-hand side.
    pub fn terminals(&self) -> BTreeSet<&str> {
        self.productions
            .iter()
            .flat_map(|p| p.rhs.iter())
            .filter(|s| !self.is_nonterminal(s))
            .map(String::as_str)
            .collect()
    }

    /// Class id of a terminal, if declared.
    pub fn class_of(&self, terminal: &str) -> Option<&str> {
        self.classes
            .iter()
            .find(|(_, members)| members.iter().any(|m| m == terminal))
            .map(|(c, _)| c.as_str())
    }

    /// Smallest derivation tree height reachable from a nonterminal, or
    /// `None` if it cannot terminate.
    pub fn min_height(&self, nt: &str) -> Option<u32> {
        self.min_height.get(nt).copied()
    }

    /// Smallest height of a subtree rooted at production `idx`.
    pub fn production_min_height(&self, idx: usize) -> Option<u32> {
        let mut h = 0;
        for s in &self.productions[idx].rhs {
            if self.is_nonterminal(s) {
                h = h.max(self.min_height(s)?);
            }
        }
        Some(h + 1)
    }

    /// Mutating accessors rebuild the lookup tables afterwards.
    pub fn edit(
        &mut self,
        f: impl FnOnce(&mut Vec<Production>, &mut BTreeMap<String, Vec<String>>),
    ) {
        f(&mut self.productions, &mut self.classes);
        self.reindex();
        self.normalize_kinds();
    }

    pub fn set_start(&mut self, start: &str) {
        self.start = start.to_string();
        self.reindex();
    }

    fn normalize_kinds(&mut self) {
        let kinds: Vec<ProductionKind> = self
            .productions
            .iter()
            .map(|p| {
                if p.rhs.iter().any(|s| self.by_lhs.contains_key(s)) {
                    ProductionKind::N
                } else {
                    ProductionKind::T
                }
            })
            .collect();
        for (p, k) in self.productions.iter_mut().zip(kinds) {
            p.kind = k;
        }
    }

    fn reindex(&mut self) {
        self.by_lhs.clear();
        for (i, p) in self.productions.iter().enumerate() {
            self.by_lhs.entry(p.lhs.clone()).or_default().push(i);
        }
        // Fixed point over min heights.
        let mut mh: HashMap<String, u32> = HashMap::new();
        loop {
            let mut changed = false;
            for p in &self.productions {
                let mut h = 0u32;
                let mut ok = true;
                for s in &p.rhs {
                    if self.by_lhs.contains_key(s) {
                        match mh.get(s) {
                            Some(&c) => h = h.max(c),
                            None => {
                                ok = false;
                                break;
                            }
                        }
                    }
                }
                if ok {
                    let cand = h + 1;
                    let e = mh.entry(p.lhs.clone()).or_insert(u32::MAX);
                    if cand < *e {
                        *e = cand;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.min_height = mh;
    }

    pub fn from_json(text: &str) -> Result<Self, GrammarIoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grammar serializes") + "\n"
    }

    pub fn read(path: &Path) -> Result<Self, GrammarIoError> {
        let text = std::fs::read_to_string(path).map_err(|source| GrammarIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    MissingStart(String),
    UnreachableNonterminal(String),
    UndeclaredSymbol {
        production: usize,
        symbol: String,
    },
    ClassOverlap {
        terminal: String,
        classes: Vec<String>,
    },
    NonPositiveWeight {
        production: usize,
    },
    KindMismatch {
        production: usize,
    },
    IterativeWithoutSelfReference {
        production: usize,
    },
    BadSymbolName(String),
    NonTerminating(String),
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::MissingStart(s) => write!(f, "start symbol {s} has no productions"),
            Finding::UnreachableNonterminal(s) => write!(f, "unreachable nonterminal {s}"),
            Finding::UndeclaredSymbol { production, symbol } => {
                write!(f, "undeclared symbol {symbol:?} in production {production}")
            }
            Finding::ClassOverlap { terminal, classes } => {
                write!(f, "class overlap: {terminal:?} in {}", classes.join(", "))
            }
            Finding::NonPositiveWeight { production } => {
                write!(f, "production {production} has a non-positive weight")
            }
            Finding::KindMismatch { production } => {
                write!(f, "production {production} has the wrong T/N kind")
            }
            Finding::IterativeWithoutSelfReference { production } => {
                write!(
                    f,
                    "iterative production {production} does not reference its lhs"
                )
            }
            Finding::BadSymbolName(s) => write!(f, "bad symbol name {s:?}"),
            Finding::NonTerminating(s) => write!(f, "nonterminal {s} cannot terminate"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.findings.is_empty()
    }
}

pub fn validate_grammar(g: &Pcfg) -> ValidationReport {
    let mut findings = Vec::new();

    if !g.is_nonterminal(&g.start) {
        findings.push(Finding::MissingStart(g.start.clone()));
    }

    let mut bad_names = BTreeSet::new();
    for p in &g.productions {
        for s in std::iter::once(&p.lhs).chain(p.rhs.iter()) {
            if s.is_empty() || s.chars().any(char::is_whitespace) {
                bad_names.insert(s.clone());
            }
        }
    }
    findings.extend(bad_names.into_iter().map(Finding::BadSymbolName));

    // reachability
    let mut seen = BTreeSet::new();
    let mut stack = vec![g.start.clone()];
    while let Some(nt) = stack.pop() {
        if !seen.insert(nt.clone()) {
            continue;
        }
        for &i in g.productions_for(&nt) {
            for s in &g.productions[i].rhs {
                if g.is_nonterminal(s) && !seen.contains(s) {
                    stack.push(s.clone());
                }
            }
        }
    }
    for nt in g.nonterminals() {
        if !seen.contains(nt) {
            findings.push(Finding::UnreachableNonterminal(nt.to_string()));
        }
        if g.min_height(nt).is_none() {
            findings.push(Finding::NonTerminating(nt.to_string()));
        }
    }

    let declared: BTreeSet<&str> = g.classes.values().flatten().map(String::as_str).collect();
    for (i, p) in g.productions.iter().enumerate() {
        for s in &p.rhs {
            if !g.is_nonterminal(s) && !declared.contains(s.as_str()) {
                findings.push(Finding::UndeclaredSymbol {
                    production: i,
                    symbol: s.clone(),
                });
            }
        }
        if !(p.weight.is_finite() && p.weight > 0.0) {
            findings.push(Finding::NonPositiveWeight { production: i });
        }
        let has_nt = p.rhs.iter().any(|s| g.is_nonterminal(s));
        if has_nt != (p.kind == ProductionKind::N) {
            findings.push(Finding::KindMismatch { production: i });
        }
        if p.iterative && !p.rhs.contains(&p.lhs) {
            findings.push(Finding::IterativeWithoutSelfReference { production: i });
        }
    }

    let mut owners: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for (class, members) in &g.classes {
        for m in members.iter().collect::<BTreeSet<_>>() {
            owners.entry(m.as_str()).or_default().push(class.clone());
        }
    }
    for (t, classes) in owners {
        if classes.len() > 1 {
            findings.push(Finding::ClassOverlap {
                terminal: t.to_string(),
                classes,
            });
        }
    }

    ValidationReport { findings }
}
