use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::{GrammarTag, Probe, ProbeDataset, ProbeExample, Split, SubProbe};
use crate::flt::{self, shared_tokens};
use crate::logic::OperatorBinding;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RecursionBound {
    pub min: u32,
    pub max: u32,
}

/// Which set constraints to check. [`DatasetRules::for_dataset`] derives the
/// standard rules from the dataset's probe kind and sub-probe.
#[derive(Debug, Clone, Default)]
pub struct DatasetRules {
    /// Check that `train_A` shares no tokens with `transfer_B ∪ test_B`.
    pub disjoint_vocabulary: bool,
    pub exemptions: BTreeSet<String>,
    pub recursion: BTreeMap<Split, RecursionBound>,
    pub label_balance: bool,
    /// Operator symbol that `transfer_B` must avoid and `test_B` must contain.
    pub probed_operator: Option<String>,
    /// Operator alphabet, used to count operators in logic expressions.
    pub operator_alphabet: Vec<String>,
    /// Operator count of the `transfer_B` supplement expressions, which are
    /// exempt from the exclusion rule.
    pub supplement_ops: usize,
    pub prefix_consistency: bool,
}

impl DatasetRules {
    pub fn for_dataset(ds: &ProbeDataset) -> Self {
        let mut r = DatasetRules {
            prefix_consistency: true,
            ..Default::default()
        };
        match ds.probe {
            Probe::Grammar => {
                // Mutated or mixed pre-training corpora only carry train_A.
                r.disjoint_vocabulary = true;
                r.exemptions = flt::default_exemptions();
                let (transfer, test) = match ds.sub_probe {
                    SubProbe::Mod => (
                        RecursionBound { min: 0, max: 2 },
                        RecursionBound { min: 0, max: 0 },
                    ),
                    _ => (
                        RecursionBound { min: 0, max: 2 },
                        RecursionBound { min: 3, max: 12 },
                    ),
                };
                r.recursion.insert(Split::TransferB, transfer);
                r.recursion.insert(Split::TestB, test);
            }
            Probe::Logic => {
                let binding = OperatorBinding::default();
                r.label_balance = true;
                r.operator_alphabet = binding.alphabet.clone();
                r.probed_operator = binding
                    .symbol_for_sub_probe(ds.sub_probe)
                    .map(str::to_string);
                r.supplement_ops = 2;
            }
            Probe::Fuzzy => {}
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatasetFinding {
    DuplicateId(String),
    RecursionBoundViolated {
        split: Split,
        id: String,
        depth: u32,
        min: u32,
        max: u32,
    },
    MissingRecursionDepth {
        split: Split,
        id: String,
    },
    SharedTerminal(String),
    LabelImbalance {
        split: Split,
        n_true: usize,
        n_false: usize,
    },
    ProbedOperatorPresent {
        id: String,
        operator: String,
    },
    ProbedOperatorMissing {
        id: String,
        operator: String,
    },
    PrefixMismatch {
        id: String,
        detail: String,
    },
}

impl fmt::Display for DatasetFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetFinding::DuplicateId(id) => write!(f, "duplicate id {id}"),
            DatasetFinding::RecursionBoundViolated {
                split,
                id,
                depth,
                min,
                max,
            } => write!(
                f,
                "recursion bound violated: {id} in {split} has depth {depth}, allowed {min}..={max}"
            ),
            DatasetFinding::MissingRecursionDepth { split, id } => {
                write!(f, "{id} in {split} has no recursion_depth")
            }
            DatasetFinding::SharedTerminal(t) => {
                write!(f, "terminal {t:?} appears in both train_A and B")
            }
            DatasetFinding::LabelImbalance {
                split,
                n_true,
                n_false,
            } => write!(
                f,
                "label imbalance in {split}: {n_true} True vs {n_false} False"
            ),
            DatasetFinding::ProbedOperatorPresent { id, operator } => {
                write!(f, "{id} contains probed operator {operator}")
            }
            DatasetFinding::ProbedOperatorMissing { id, operator } => {
                write!(f, "{id} lacks probed operator {operator}")
            }
            DatasetFinding::PrefixMismatch { id, detail } => write!(f, "{id}: {detail}"),
        }
    }
}

fn tag_for_prefix(prefix: &str) -> Option<GrammarTag> {
    crate::mutations::MutationName::from_prefix(prefix).map(|m| m.grammar_tag())
}

pub fn validate_dataset(ds: &ProbeDataset, rules: &DatasetRules) -> Vec<DatasetFinding> {
    let mut findings = Vec::new();

    let mut ids = BTreeSet::new();
    for e in ds.examples() {
        if !ids.insert(e.id.as_str()) {
            findings.push(DatasetFinding::DuplicateId(e.id.clone()));
        }
    }

    for (split, bound) in &rules.recursion {
        for e in ds.split(*split) {
            match e.meta.recursion_depth {
                Some(d) if d < bound.min || d > bound.max => {
                    findings.push(DatasetFinding::RecursionBoundViolated {
                        split: *split,
                        id: e.id.clone(),
                        depth: d,
                        min: bound.min,
                        max: bound.max,
                    })
                }
                Some(_) => {}
                None => findings.push(DatasetFinding::MissingRecursionDepth {
                    split: *split,
                    id: e.id.clone(),
                }),
            }
        }
    }

    if rules.disjoint_vocabulary {
        let b: Vec<&ProbeExample> = ds
            .split(Split::TransferB)
            .iter()
            .chain(ds.split(Split::TestB))
            .collect();
        let a: Vec<&ProbeExample> = ds.split(Split::TrainA).iter().collect();
        if !a.is_empty() && !b.is_empty() {
            for t in shared_tokens(a, b, &rules.exemptions) {
                findings.push(DatasetFinding::SharedTerminal(t));
            }
        }
    }

    if rules.label_balance {
        for (split, ex) in &ds.splits {
            let n_true = ex
                .iter()
                .filter(|e| e.meta.label.as_deref() == Some("True"))
                .count();
            let n_false = ex
                .iter()
                .filter(|e| e.meta.label.as_deref() == Some("False"))
                .count();
            if n_true.abs_diff(n_false) > 1 {
                findings.push(DatasetFinding::LabelImbalance {
                    split: *split,
                    n_true,
                    n_false,
                });
            }
        }
    }

    if let Some(op) = &rules.probed_operator {
        let is_op = |t: &str| rules.operator_alphabet.iter().any(|a| a == t);
        for e in ds.split(Split::TransferB) {
            let n_ops = e.source_tokens().filter(|t| is_op(t)).count();
            if n_ops != rules.supplement_ops && e.source_tokens().any(|t| t == op) {
                findings.push(DatasetFinding::ProbedOperatorPresent {
                    id: e.id.clone(),
                    operator: op.clone(),
                });
            }
        }
        for e in ds.split(Split::TestB) {
            if !e.source_tokens().any(|t| t == op) {
                findings.push(DatasetFinding::ProbedOperatorMissing {
                    id: e.id.clone(),
                    operator: op.clone(),
                });
            }
        }
    }

    if rules.prefix_consistency {
        for e in ds.examples() {
            let Some(prefix) = &e.prefix else { continue };
            if e.source_tokens().next() != Some(prefix.as_str()) {
                findings.push(DatasetFinding::PrefixMismatch {
                    id: e.id.clone(),
                    detail: format!("source does not start with prefix {prefix:?}"),
                });
            } else if tag_for_prefix(prefix) != Some(e.grammar_tag) {
                findings.push(DatasetFinding::PrefixMismatch {
                    id: e.id.clone(),
                    detail: format!(
                        "prefix {prefix:?} disagrees with grammar_tag {}",
                        e.grammar_tag
                    ),
                });
            }
        }
    }

    findings
}
