//! Formal-language translation probe: paired source/target grammars, the
//! homomorphic map between them, terminal resampling and suite generation.

mod cogs;
mod default;
mod resample;
mod suite;

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dataset::ProbeExample;
use crate::grammar::{Derivation, DerivationChild, DerivationNode, GrammarIoError, Pcfg};

pub use cogs::{convert_cogs_logical_form, read_cogs_tsv, CogsError, CogsOptions, CogsRow};
pub use default::{build_default_grammar_pair, GrammarOptions, Lexicon};
pub use resample::{resample_terminals, ResampleError, TerminalMap, WordList};
pub use suite::{generate_probe_suite, ProbeSuite, ProbeSuiteConfig, SplitCounts, SuiteError};

/// Class id whose target images are drawn independently on resampling.
pub const CONJ_CLASS: &str = "S_c";
pub const CONCAT_CLASS: &str = "S_C";
pub const OTHER_CLASS: &str = "other";
pub const NONE: &str = "NONE";

/// How one source production is realized on the target side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleImage {
    /// `children[k]` is the position, among the source rule's nonterminal
    /// children, of the subtree that fills the k-th target nonterminal.
    Rule { target: usize, children: Vec<usize> },
    /// Maps to nothing (determiners, adjectives).
    Exempt,
    /// The target rule was removed by a mutation.
    Dropped,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MapError {
    #[error("unmapped rule: {0}")]
    UnmappedRule(String),
    #[error("rule {rule} aligns child {child} but has only {available} nonterminal children")]
    BadAlignment {
        rule: String,
        child: usize,
        available: usize,
    },
}

/// A source grammar, a target grammar and the rule-level homomorphism.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarPair {
    pub source: Pcfg,
    pub target: Pcfg,
    /// One entry per source production, by index.
    pub images: Vec<RuleImage>,
}

impl GrammarPair {
    pub fn from_json(text: &str) -> Result<Self, GrammarIoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("grammar pair serializes") + "\n"
    }

    pub fn read(path: &Path) -> Result<Self, GrammarIoError> {
        let text = std::fs::read_to_string(path).map_err(|source| GrammarIoError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Source terminal → target terminal, read off the T-production images.
    pub fn terminal_table(&self) -> BTreeMap<String, String> {
        let mut out = BTreeMap::new();
        for (i, p) in self.source.productions().iter().enumerate() {
            if let (RuleImage::Rule { target, .. }, [s]) = (&self.images[i], p.rhs.as_slice()) {
                if let [t] = self.target.production(*target).rhs.as_slice() {
                    if !self.source.is_nonterminal(s) && !self.target.is_nonterminal(t) {
                        out.insert(s.clone(), t.clone());
                    }
                }
            }
        }
        out
    }

    /// Source tokens that have no target image.
    pub fn exempt_terminals(&self) -> BTreeSet<String> {
        self.source
            .productions()
            .iter()
            .zip(&self.images)
            .filter(|(_, img)| **img == RuleImage::Exempt)
            .flat_map(|(p, _)| p.rhs.iter())
            .filter(|s| !self.source.is_nonterminal(s))
            .cloned()
            .collect()
    }

    /// Structural problems with the mapping tables: wrong arity, slot
    /// symbols that disagree with the image of the child, inconsistent
    /// nonterminal images.
    pub fn check(&self) -> Vec<String> {
        let mut problems = Vec::new();
        let src = &self.source;
        let tgt = &self.target;
        if self.images.len() != src.productions().len() {
            problems.push(format!(
                "{} images for {} source productions",
                self.images.len(),
                src.productions().len()
            ));
            return problems;
        }
        // Image of each source nonterminal, taken from its first mapped rule.
        let mut nt_image: BTreeMap<&str, &str> = BTreeMap::new();
        for (p, img) in src.productions().iter().zip(&self.images) {
            if let RuleImage::Rule { target, .. } = img {
                let Some(tp) = tgt.productions().get(*target) else {
                    problems.push(format!("{p} maps to missing target rule {target}"));
                    continue;
                };
                match nt_image.get(p.lhs.as_str()) {
                    Some(l) if *l != tp.lhs => {
                        problems.push(format!("{} maps to both {l} and {}", p.lhs, tp.lhs))
                    }
                    _ => {
                        nt_image.insert(&p.lhs, &tp.lhs);
                    }
                }
            }
        }
        for (p, img) in src.productions().iter().zip(&self.images) {
            let RuleImage::Rule { target, children } = img else {
                continue;
            };
            let Some(tp) = tgt.productions().get(*target) else {
                continue;
            };
            let src_nts: Vec<&String> = p.rhs.iter().filter(|s| src.is_nonterminal(s)).collect();
            let slots: Vec<&String> = tp.rhs.iter().filter(|s| tgt.is_nonterminal(s)).collect();
            if slots.len() != children.len() {
                problems.push(format!(
                    "{p}: {} target slots but {} aligned children",
                    slots.len(),
                    children.len()
                ));
                continue;
            }
            for (slot, &c) in slots.iter().zip(children) {
                match src_nts.get(c) {
                    None => problems.push(format!("{p}: child {c} out of range")),
                    Some(child) => {
                        if let Some(img) = nt_image.get(child.as_str()) {
                            if img != slot {
                                problems.push(format!(
                                    "{p}: slot {slot} filled by {child}, whose image is {img}"
                                ));
                            }
                        }
                    }
                }
            }
        }
        problems
    }
}

/// Target tokens for a whole derivation of `pair.source`.
pub fn map_derivation_to_target(pair: &GrammarPair, d: &Derivation) -> Result<String, MapError> {
    Ok(map_node(pair, &d.root)?.join(" "))
}

/// Target tokens for one source subtree.
pub fn map_node(pair: &GrammarPair, node: &DerivationNode) -> Result<Vec<String>, MapError> {
    let mut out = Vec::new();
    push_image(pair, node, &mut out)?;
    Ok(out)
}

fn push_image(
    pair: &GrammarPair,
    node: &DerivationNode,
    out: &mut Vec<String>,
) -> Result<(), MapError> {
    let rule = || pair.source.production(node.production).to_string();
    let (target, children) = match pair.images.get(node.production) {
        Some(RuleImage::Rule { target, children }) => (*target, children),
        Some(RuleImage::Exempt) => return Ok(()),
        Some(RuleImage::Dropped) | None => return Err(MapError::UnmappedRule(rule())),
    };
    let kids: Vec<&DerivationNode> = node
        .children
        .iter()
        .filter_map(|c| match c {
            DerivationChild::Node(n) => Some(n),
            DerivationChild::Leaf(_) => None,
        })
        .collect();
    let mut slot = 0;
    for sym in &pair.target.production(target).rhs {
        if pair.target.is_nonterminal(sym) {
            let c = children[slot];
            let child = kids.get(c).ok_or_else(|| MapError::BadAlignment {
                rule: rule(),
                child: c,
                available: kids.len(),
            })?;
            push_image(pair, child, out)?;
            slot += 1;
        } else {
            out.push(sym.clone());
        }
    }
    Ok(())
}

/// Source sentence as stored in datasets: tokens joined by spaces with the
/// first letter upper-cased.
pub fn render_source(tokens: &[String]) -> String {
    let mut s = tokens.join(" ");
    if let Some(c) = s.chars().next() {
        let upper: String = c.to_uppercase().collect();
        s.replace_range(..c.len_utf8(), &upper);
    }
    s
}

/// Tokens allowed on both sides of a disjointness check.
pub fn default_exemptions() -> BTreeSet<String> {
    [
        ".", "(", ")", ",", NONE, "a", "the", "A", "The", "was", "to", "by",
    ]
    .into_iter()
    .map(String::from)
    .collect()
}

/// Tokens (source or target side) occurring in both slices, minus exemptions.
pub fn shared_tokens<'a, 'b>(
    a: impl IntoIterator<Item = &'a ProbeExample>,
    b: impl IntoIterator<Item = &'b ProbeExample>,
    exemptions: &BTreeSet<String>,
) -> Vec<String> {
    let vocab = |e: &ProbeExample| -> Vec<String> {
        e.source_tokens()
            .chain(e.target_tokens())
            .filter(|t| !exemptions.contains(*t))
            .map(String::from)
            .collect()
    };
    let va: BTreeSet<String> = a.into_iter().flat_map(vocab).collect();
    let vb: BTreeSet<String> = b.into_iter().flat_map(vocab).collect();
    va.intersection(&vb).cloned().collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct DisjointnessReport {
    pub shared: Vec<String>,
}

impl DisjointnessReport {
    pub fn is_disjoint(&self) -> bool {
        self.shared.is_empty()
    }
}

pub fn check_terminal_disjointness(
    set_a: &[ProbeExample],
    set_b: &[ProbeExample],
    exemptions: &BTreeSet<String>,
) -> DisjointnessReport {
    DisjointnessReport {
        shared: shared_tokens(set_a, set_b, exemptions),
    }
}

/// Display form of a chain target with `NONE` arguments dropped, e.g.
/// `EAT ( EMMA , NONE , NONE )` becomes `EAT ( EMMA )`.
pub fn omit_none(target: &str) -> String {
    let mut toks: Vec<&str> = target.split_whitespace().collect();
    while let Some(i) = toks.iter().position(|t| *t == NONE) {
        if i > 0 && toks[i - 1] == "," {
            toks.drain(i - 1..=i);
        } else if toks.get(i + 1) == Some(&",") {
            toks.drain(i..=i + 1);
        } else {
            toks.remove(i);
        }
    }
    toks.join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn none_omission() {
        assert_eq!(omit_none("EAT ( EMMA , NONE , NONE )"), "EAT ( EMMA )");
        assert_eq!(omit_none("P ( NONE , T , NONE )"), "P ( T )");
        assert_eq!(
            omit_none("LIKE ( EMMA , NONE , NONE ) CCOMP SEE ( GIRL , NONE , NONE )"),
            "LIKE ( EMMA ) CCOMP SEE ( GIRL )"
        );
    }

    #[test]
    fn first_letter_is_capitalized() {
        let toks: Vec<String> = ["the", "baby", "screamed", "."].map(String::from).to_vec();
        assert_eq!(render_source(&toks), "The baby screamed .");
    }
}
