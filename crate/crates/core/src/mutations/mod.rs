//! Grammar derivations: target-side Reverse, Coarse, LocalReverse and
//! Nested, source-side Redundant, and multi-grammar corpora.

mod multi;
mod strings;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::dataset::GrammarTag;
use crate::flt::{GrammarPair, RuleImage, WordList, NONE};
use crate::grammar::{Pcfg, Production};
use crate::seed::example_rng;

pub use multi::{build_multigrammar_corpus, sample_corpus};
pub use strings::{
    coarse_string, local_reverse_string, nested_string, reverse_string, split_chain, Chain,
    ChainError,
};

pub const ADJ_CLASS: &str = "S_adj";
pub const DEFAULT_ADJECTIVES: usize = 32;
pub const DEFAULT_INSERTION: f64 = 0.5;

/// Names used on the command line and as multi-grammar prefix tokens.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MutationName {
    Original,
    Coarse,
    #[serde(rename = "localreverse")]
    LocalReverse,
    Nest,
    Reverse,
    Redundant,
}

impl MutationName {
    pub const ALL: [MutationName; 6] = [
        MutationName::Original,
        MutationName::Coarse,
        MutationName::LocalReverse,
        MutationName::Nest,
        MutationName::Reverse,
        MutationName::Redundant,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MutationName::Original => "original",
            MutationName::Coarse => "coarse",
            MutationName::LocalReverse => "localreverse",
            MutationName::Nest => "nest",
            MutationName::Reverse => "reverse",
            MutationName::Redundant => "redundant",
        }
    }

    pub fn grammar_tag(self) -> GrammarTag {
        match self {
            MutationName::Original => GrammarTag::Original,
            MutationName::Coarse => GrammarTag::Coarse,
            MutationName::LocalReverse => GrammarTag::LocalR,
            MutationName::Nest => GrammarTag::Nested,
            MutationName::Reverse => GrammarTag::Reverse,
            MutationName::Redundant => GrammarTag::Redundant,
        }
    }

    /// The name a prefix token stands for, if any.
    pub fn from_prefix(prefix: &str) -> Option<Self> {
        prefix.parse().ok()
    }

    /// Applies the mutation. `Redundant` draws its adjectives from `words`.
    pub fn apply(
        self,
        pair: &GrammarPair,
        words: &WordList,
        seed: u64,
    ) -> Result<GrammarPair, MutationError> {
        Ok(match self {
            MutationName::Original => pair.clone(),
            MutationName::Coarse => coarse_target(pair),
            MutationName::LocalReverse => local_reverse_target(pair),
            MutationName::Nest => nested_target(pair),
            MutationName::Reverse => reverse_target(pair),
            MutationName::Redundant => {
                let adj = sample_adjectives(&[pair], words, seed, DEFAULT_ADJECTIVES)?;
                redundant_source(pair, &adj, DEFAULT_INSERTION)?
            }
        })
    }
}

impl fmt::Display for MutationName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MutationName {
    type Err = MutationError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MutationName::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| MutationError::UnknownMutation(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MutationError {
    #[error("unknown mutation {0:?} (expected original, coarse, localreverse, nest, reverse or redundant)")]
    UnknownMutation(String),
    #[error("mutation {0} cannot be used in a multi-grammar corpus")]
    NotForMultigrammar(MutationName),
    #[error("class collision: adjective {0:?} is already a symbol of the grammar pair")]
    ClassCollision(String),
    #[error("insertion probability must be in [0, 1), got {0}")]
    Probability(f64),
    #[error("word list exhausted: need {needed} adjectives, have {available}")]
    Exhausted { needed: usize, available: usize },
    #[error("sampling failed: {0}")]
    Sample(String),
}

/// The iterative target rule `CHAIN → CLAUSE' CONCAT CHAIN`, if present.
fn chain_rule(t: &Pcfg) -> Option<usize> {
    t.productions().iter().position(|p| p.iterative)
}

/// Target rules realizing a clause: `P ( ... )` rules whose lhs is a
/// non-connective child of a chain-level rule.
fn clause_rules(t: &Pcfg) -> Vec<usize> {
    let Some(ci) = chain_rule(t) else {
        return vec![];
    };
    let chain = &t.production(ci).lhs;
    let mut clause_syms = BTreeSet::new();
    for &i in t.productions_for(chain) {
        for s in &t.production(i).rhs {
            if s != chain && t.is_nonterminal(s) {
                clause_syms.insert(s.clone());
            }
        }
    }
    t.productions()
        .iter()
        .enumerate()
        .filter(|(_, p)| clause_syms.contains(&p.lhs) && p.rhs.iter().any(|s| s == "("))
        .map(|(i, _)| i)
        .collect()
}

fn swap_paren(s: &str) -> String {
    match s {
        "(" => ")".into(),
        ")" => "(".into(),
        other => other.into(),
    }
}

/// Replaces target rule `idx` by `rhs`, with `remap` rewriting the child
/// alignment of every image that points at it.
fn rewrite_rule(
    pair: &mut GrammarPair,
    idx: usize,
    rhs: Vec<String>,
    remap: &dyn Fn(&[usize]) -> Vec<usize>,
) {
    pair.target.edit(|ps, _| ps[idx].rhs = rhs);
    for img in &mut pair.images {
        if let RuleImage::Rule { target, children } = img {
            if *target == idx {
                *children = remap(children);
            }
        }
    }
}

fn reverse_rules(pair: &GrammarPair, keep: &dyn Fn(usize, &Production) -> bool) -> GrammarPair {
    let mut out = pair.clone();
    let todo: Vec<usize> = (0..pair.target.productions().len())
        .filter(|&i| !keep(i, pair.target.production(i)))
        .collect();
    for i in todo {
        let rhs = pair
            .target
            .production(i)
            .rhs
            .iter()
            .rev()
            .map(|s| swap_paren(s))
            .collect();
        rewrite_rule(&mut out, i, rhs, &|c| c.iter().rev().copied().collect());
    }
    out
}

/// Contrast grammar: every target rule reversed, so whole targets read
/// backwards with parentheses re-oriented.
pub fn reverse_target(pair: &GrammarPair) -> GrammarPair {
    reverse_rules(pair, &|_, _| false)
}

/// Every target rule except the chaining rule reversed: clauses keep their
/// order, tokens inside each clause are reversed.
pub fn local_reverse_target(pair: &GrammarPair) -> GrammarPair {
    reverse_rules(pair, &|_, p| p.iterative)
}

/// Drops every argument slot: clauses become `P ( )`.
pub fn coarse_target(pair: &GrammarPair) -> GrammarPair {
    let mut out = pair.clone();
    for i in clause_rules(&pair.target) {
        let rhs = &pair.target.production(i).rhs;
        let open = rhs
            .iter()
            .position(|s| s == "(")
            .expect("clause rule has (");
        let keep = rhs[..open]
            .iter()
            .filter(|s| pair.target.is_nonterminal(s))
            .count();
        let mut new: Vec<String> = rhs[..=open].to_vec();
        new.push(")".into());
        rewrite_rule(&mut out, i, new, &|c| c[..keep].to_vec());
    }
    prune_target(&mut out);
    out
}

/// Replaces the chaining rule by nesting: each following clause becomes the
/// last argument of the one before it. `NONE` slots of enclosing clauses are
/// dropped.
pub fn nested_target(pair: &GrammarPair) -> GrammarPair {
    let mut out = pair.clone();
    let t = &pair.target;
    let Some(ci) = chain_rule(t) else {
        return out;
    };
    let chain = t.production(ci);
    let Some(first) = chain
        .rhs
        .iter()
        .find(|s| t.is_nonterminal(s) && **s != chain.lhs)
    else {
        return out;
    };
    let enclosing: Vec<usize> = t
        .productions_for(first)
        .iter()
        .copied()
        .filter(|&i| t.production(i).rhs.iter().any(|s| s == "("))
        .collect();
    for i in enclosing {
        let mut rhs = t.production(i).rhs.clone();
        while let Some(k) = rhs.iter().position(|s| s == NONE) {
            if k > 0 && rhs[k - 1] == "," {
                rhs.drain(k - 1..=k);
            } else if rhs.get(k + 1).is_some_and(|s| s == ",") {
                rhs.drain(k..=k + 1);
            } else {
                rhs.remove(k);
            }
        }
        if rhs.last().is_some_and(|s| s == ")") {
            rhs.pop();
            if rhs.last().is_some_and(|s| s != "(") {
                rhs.push(",".into());
            }
        }
        rewrite_rule(&mut out, i, rhs, &|c| c.to_vec());
    }
    let mut rhs = chain.rhs.clone();
    rhs.push(")".into());
    rewrite_rule(&mut out, ci, rhs, &|c| c.to_vec());
    prune_target(&mut out);
    out
}

/// Removes target rules unreachable from the start symbol and terminals no
/// longer used. Images of removed rules become [`RuleImage::Dropped`].
fn prune_target(pair: &mut GrammarPair) {
    let t = &pair.target;
    let mut seen = BTreeSet::new();
    let mut stack = vec![t.start().to_string()];
    while let Some(nt) = stack.pop() {
        if !seen.insert(nt.clone()) {
            continue;
        }
        for &i in t.productions_for(&nt) {
            for s in &t.production(i).rhs {
                if t.is_nonterminal(s) {
                    stack.push(s.clone());
                }
            }
        }
    }
    let mut new_index = BTreeMap::new();
    let mut kept = Vec::new();
    for (i, p) in t.productions().iter().enumerate() {
        if seen.contains(&p.lhs) {
            new_index.insert(i, kept.len());
            kept.push(p.clone());
        }
    }
    let used: BTreeSet<String> = kept.iter().flat_map(|p| p.rhs.iter().cloned()).collect();
    pair.target.edit(|ps, cs| {
        *ps = kept;
        for ms in cs.values_mut() {
            ms.retain(|m| used.contains(m));
        }
        cs.retain(|_, ms| !ms.is_empty());
    });
    for img in &mut pair.images {
        if let RuleImage::Rule { target, .. } = img {
            match new_index.get(target) {
                Some(&n) => *target = n,
                None => *img = RuleImage::Dropped,
            }
        }
    }
}

/// Draws `n` adjectives from `words` that collide with no symbol of the
/// given pairs.
pub fn sample_adjectives(
    pairs: &[&GrammarPair],
    words: &WordList,
    seed: u64,
    n: usize,
) -> Result<Vec<String>, MutationError> {
    let taken = taken_symbols(pairs);
    let mut seen = BTreeSet::new();
    let mut pool: Vec<String> = words
        .words
        .iter()
        .map(|w| w.to_lowercase())
        .filter(|w| w.chars().all(char::is_alphabetic) && !taken.contains(w))
        .filter(|w| seen.insert(w.clone()))
        .collect();
    if pool.len() < n {
        return Err(MutationError::Exhausted {
            needed: n,
            available: pool.len(),
        });
    }
    pool.shuffle(&mut example_rng(seed, "adjectives", 0));
    pool.truncate(n);
    Ok(pool)
}

fn taken_symbols(pairs: &[&GrammarPair]) -> BTreeSet<String> {
    let mut taken = BTreeSet::new();
    for pair in pairs {
        for g in [&pair.source, &pair.target] {
            for p in g.productions() {
                taken.insert(p.lhs.to_lowercase());
                taken.extend(p.rhs.iter().map(|s| s.to_lowercase()));
            }
            taken.extend(g.classes().values().flatten().map(|s| s.to_lowercase()));
        }
    }
    taken
}

/// Lets an unmapped adjective precede every noun-class slot with
/// probability `p`. Targets are unaffected.
pub fn redundant_source(
    pair: &GrammarPair,
    adjectives: &[String],
    p: f64,
) -> Result<GrammarPair, MutationError> {
    if !(0.0..1.0).contains(&p) {
        return Err(MutationError::Probability(p));
    }
    if p == 0.0 {
        return Ok(pair.clone());
    }
    let taken = taken_symbols(&[pair]);
    if let Some(a) = adjectives
        .iter()
        .find(|a| taken.contains(&a.to_lowercase()))
    {
        return Err(MutationError::ClassCollision(a.clone()));
    }
    let src = &pair.source;
    let nouns: BTreeSet<&String> = src.classes().get("S_n").into_iter().flatten().collect();
    // Nonterminals that expand only to nouns.
    let noun_syms: BTreeSet<&str> = src
        .nonterminals()
        .filter(|nt| {
            src.productions_for(nt).iter().all(|&i| {
                let r = &src.production(i).rhs;
                r.len() == 1 && nouns.contains(&r[0])
            })
        })
        .collect();
    let mut adj_sym = "ADJ".to_string();
    while src.is_nonterminal(&adj_sym) || taken.contains(&adj_sym.to_lowercase()) {
        adj_sym.push('_');
    }

    let mut out = pair.clone();
    let mut new_rules = Vec::new();
    let mut new_images = Vec::new();
    let mut reweight = Vec::new();
    for (i, prod) in src.productions().iter().enumerate() {
        let Some(pos) = prod.rhs.iter().position(|s| noun_syms.contains(s.as_str())) else {
            continue;
        };
        let nt_before = prod.rhs[..pos]
            .iter()
            .filter(|s| src.is_nonterminal(s))
            .count();
        let mut rhs = prod.rhs.clone();
        rhs.insert(pos, adj_sym.clone());
        let mut r = prod.clone();
        r.rhs = rhs;
        r.weight = prod.weight * p;
        new_rules.push(r);
        new_images.push(match &pair.images[i] {
            RuleImage::Rule { target, children } => RuleImage::Rule {
                target: *target,
                children: children
                    .iter()
                    .map(|&c| if c >= nt_before { c + 1 } else { c })
                    .collect(),
            },
            other => other.clone(),
        });
        reweight.push(i);
    }
    out.source.edit(|ps, cs| {
        for &i in &reweight {
            ps[i].weight *= 1.0 - p;
        }
        ps.extend(new_rules);
        for a in adjectives {
            ps.push(Production::new(&adj_sym, &[a]));
        }
        cs.insert(ADJ_CLASS.to_string(), adjectives.to_vec());
    });
    out.images.extend(new_images);
    out.images
        .extend(std::iter::repeat_n(RuleImage::Exempt, adjectives.len()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flt::{build_default_grammar_pair, GrammarOptions};
    use crate::grammar::validate_grammar;

    #[test]
    fn names_round_trip() {
        for m in MutationName::ALL {
            assert_eq!(m.as_str().parse::<MutationName>().unwrap(), m);
            assert_eq!(MutationName::from_prefix(m.as_str()), Some(m));
        }
        assert!("nested".parse::<MutationName>().is_err());
    }

    #[test]
    fn mutated_grammars_stay_well_formed() {
        let pair = build_default_grammar_pair(&GrammarOptions::default());
        for g in [
            reverse_target(&pair),
            local_reverse_target(&pair),
            coarse_target(&pair),
            nested_target(&pair),
        ] {
            assert!(
                validate_grammar(&g.target).is_empty(),
                "{:?}",
                validate_grammar(&g.target)
            );
            assert!(g.check().is_empty(), "{:?}", g.check());
        }
    }

    #[test]
    fn redundant_rejects_collisions_and_bad_probability() {
        let pair = build_default_grammar_pair(&GrammarOptions::default());
        assert_eq!(
            redundant_source(&pair, &["dog".into()], 0.5),
            Err(MutationError::ClassCollision("dog".into()))
        );
        assert!(redundant_source(&pair, &["odd".into()], 1.0).is_err());
        assert_eq!(redundant_source(&pair, &["odd".into()], 0.0).unwrap(), pair);
        let r = redundant_source(&pair, &["odd".into(), "angry".into()], 0.5).unwrap();
        assert!(validate_grammar(&r.source).is_empty());
        assert!(r.check().is_empty());
    }
}
