use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{GrammarPair, RuleImage, CONJ_CLASS, OTHER_CLASS};
use crate::dataset::digest_hex;
use crate::grammar::Production;
use crate::seed::example_rng;

const BUNDLED: &str = include_str!("../../data/wordlist.txt");

/// Pool of candidate terminals, one word per line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordList {
    /// Short content digest, recorded in terminal maps.
    pub id: String,
    pub words: Vec<String>,
}

impl WordList {
    pub fn bundled() -> Self {
        Self::from_text(BUNDLED)
    }

    pub fn from_text(text: &str) -> Self {
        WordList {
            id: digest_hex(text.as_bytes())[..16].to_string(),
            words: text
                .lines()
                .map(str::trim)
                .filter(|w| !w.is_empty() && !w.starts_with('#'))
                .map(String::from)
                .collect(),
        }
    }

    pub fn read(path: &Path) -> std::io::Result<Self> {
        Ok(Self::from_text(&std::fs::read_to_string(path)?))
    }
}

/// Old → new terminal per class. Terminals added to grow the conjunction
/// classes are keyed `+1`, `+2`, ...
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TerminalMap {
    #[serde(skip)]
    pub word_list: String,
    #[serde(skip)]
    pub seed: u64,
    #[serde(flatten)]
    pub classes: BTreeMap<String, BTreeMap<String, String>>,
}

impl TerminalMap {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("terminal map serializes") + "\n"
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Flattened old → new over all classes.
    pub fn lookup(&self) -> BTreeMap<&str, &str> {
        self.classes
            .values()
            .flatten()
            .filter(|(k, _)| !k.starts_with('+'))
            .map(|(k, v)| (k.as_str(), v.as_str()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResampleError {
    #[error(
        "word list exhausted: need {needed} unused words, have {available} (short by {shortfall})"
    )]
    Exhausted {
        needed: usize,
        available: usize,
        shortfall: usize,
    },
    #[error("n_conjunctions must be at least {existing} (got {requested})")]
    ConjunctionCount { requested: usize, existing: usize },
    #[error("grammar has no conjunction rule to extend")]
    NoConjunctionRule,
}

/// Replaces every semantic terminal of both grammars by a fresh word and
/// grows the conjunction classes to `n_conjunctions` paired members.
///
/// Target images are the upper-cased source replacements, except for
/// conjunctions whose target terminals are drawn independently.
pub fn resample_terminals(
    pair: &GrammarPair,
    words: &WordList,
    seed: u64,
    n_conjunctions: usize,
) -> Result<(GrammarPair, TerminalMap), ResampleError> {
    let src = &pair.source;
    let tgt = &pair.target;

    let mut taken: BTreeSet<String> = BTreeSet::new();
    for g in [src, tgt] {
        for p in g.productions() {
            taken.insert(p.lhs.to_lowercase());
            taken.extend(p.rhs.iter().map(|s| s.to_lowercase()));
        }
        taken.extend(g.classes().values().flatten().map(|s| s.to_lowercase()));
    }
    let mut seen = BTreeSet::new();
    let mut pool: Vec<String> = words
        .words
        .iter()
        .map(|w| w.to_lowercase())
        .filter(|w| w.chars().all(char::is_alphabetic) && !taken.contains(w))
        .filter(|w| seen.insert(w.clone()))
        .collect();
    pool.shuffle(&mut example_rng(seed, "terminals", 0));

    let table = pair.terminal_table();
    let conj_members: Vec<String> = src.classes().get(CONJ_CLASS).cloned().unwrap_or_default();
    if n_conjunctions == 0 || n_conjunctions < conj_members.len() {
        return Err(ResampleError::ConjunctionCount {
            requested: n_conjunctions,
            existing: conj_members.len().max(1),
        });
    }
    let extra = n_conjunctions - conj_members.len();

    let semantic: Vec<(&String, &String)> = src
        .classes()
        .iter()
        .filter(|(c, _)| c.as_str() != OTHER_CLASS)
        .flat_map(|(c, ms)| ms.iter().map(move |m| (c, m)))
        .collect();
    let conj_targets: BTreeSet<&String> =
        conj_members.iter().filter_map(|m| table.get(m)).collect();
    let needed = semantic.len() + conj_targets.len() + 2 * extra;
    if pool.len() < needed {
        return Err(ResampleError::Exhausted {
            needed,
            available: pool.len(),
            shortfall: needed - pool.len(),
        });
    }
    let mut fresh = pool.into_iter();
    let mut next = || fresh.next().expect("pool size checked");

    let mut map = TerminalMap {
        word_list: words.id.clone(),
        seed,
        classes: BTreeMap::new(),
    };
    let mut src_sub: BTreeMap<String, String> = BTreeMap::new();
    let mut tgt_sub: BTreeMap<String, String> = BTreeMap::new();
    for (class, m) in semantic {
        let new = next();
        map.classes
            .entry(class.clone())
            .or_default()
            .insert(m.clone(), new.clone());
        src_sub.insert(m.clone(), new.clone());
        if let Some(t) = table.get(m) {
            if !tgt_sub.contains_key(t) {
                let new_t = if class == CONJ_CLASS {
                    next().to_uppercase()
                } else {
                    new.to_uppercase()
                };
                let tclass = tgt.class_of(t).unwrap_or(OTHER_CLASS).to_string();
                map.classes
                    .entry(tclass)
                    .or_default()
                    .insert(t.clone(), new_t.clone());
                tgt_sub.insert(t.clone(), new_t);
            }
        }
    }

    let mut out = pair.clone();
    out.source.edit(|ps, cs| {
        for p in ps.iter_mut() {
            for s in p.rhs.iter_mut() {
                if let Some(n) = src_sub.get(s) {
                    *s = n.clone();
                }
            }
        }
        for ms in cs.values_mut() {
            for m in ms.iter_mut() {
                if let Some(n) = src_sub.get(m) {
                    *m = n.clone();
                }
            }
        }
    });
    out.target.edit(|ps, cs| {
        for p in ps.iter_mut() {
            for s in p.rhs.iter_mut() {
                if let Some(n) = tgt_sub.get(s) {
                    *s = n.clone();
                }
            }
        }
        for ms in cs.values_mut() {
            for m in ms.iter_mut() {
                if let Some(n) = tgt_sub.get(m) {
                    *m = n.clone();
                }
            }
        }
    });

    if extra > 0 {
        // The existing conjunction rule supplies the lhs symbols and weight.
        let (ci, conj_rule) = src
            .productions()
            .iter()
            .enumerate()
            .find(|(_, p)| p.rhs.len() == 1 && conj_members.contains(&p.rhs[0]))
            .ok_or(ResampleError::NoConjunctionRule)?;
        let RuleImage::Rule { target: ti, .. } = &pair.images[ci] else {
            return Err(ResampleError::NoConjunctionRule);
        };
        let concat_rule = tgt.production(*ti);
        let concat_class = tgt
            .class_of(&concat_rule.rhs[0])
            .unwrap_or(OTHER_CLASS)
            .to_string();
        let mut added = Vec::with_capacity(extra);
        for k in 1..=extra {
            let s = next();
            let t = next().to_uppercase();
            map.classes
                .entry(CONJ_CLASS.to_string())
                .or_default()
                .insert(format!("+{k}"), s.clone());
            map.classes
                .entry(concat_class.clone())
                .or_default()
                .insert(format!("+{k}"), t.clone());
            added.push((s, t));
        }
        let n_tgt = out.target.productions().len();
        out.target.edit(|ps, cs| {
            for (_, t) in &added {
                ps.push(Production::new(&concat_rule.lhs, &[t]).weight(concat_rule.weight));
                cs.entry(concat_class.clone()).or_default().push(t.clone());
            }
        });
        out.source.edit(|ps, cs| {
            for (s, _) in &added {
                ps.push(Production::new(&conj_rule.lhs, &[s]).weight(conj_rule.weight));
                cs.entry(CONJ_CLASS.to_string())
                    .or_default()
                    .push(s.clone());
            }
        });
        for k in 0..extra {
            out.images.push(RuleImage::Rule {
                target: n_tgt + k,
                children: vec![],
            });
        }
    }
    Ok((out, map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flt::{build_default_grammar_pair, GrammarOptions};
    use crate::grammar::validate_grammar;

    #[test]
    fn conjunction_class_grows_and_vocabularies_are_disjoint() {
        let pair = build_default_grammar_pair(&GrammarOptions::default());
        let (new, map) = resample_terminals(&pair, &WordList::bundled(), 3, 32).unwrap();
        assert_eq!(new.source.classes()[CONJ_CLASS].len(), 32);
        assert_eq!(new.target.classes()["S_C"].len(), 32);
        assert!(validate_grammar(&new.source).is_empty());
        assert!(validate_grammar(&new.target).is_empty());
        assert!(new.check().is_empty());
        let semantic = |p: &GrammarPair| -> BTreeSet<String> {
            p.source
                .classes()
                .iter()
                .chain(p.target.classes())
                .filter(|(c, _)| c.as_str() != OTHER_CLASS)
                .flat_map(|(_, ms)| ms.clone())
                .collect()
        };
        assert!(semantic(&new).is_disjoint(&semantic(&pair)));
        assert_eq!(map.classes["S_v"].len(), 32);
        let back = TerminalMap::from_json(&map.to_json()).unwrap();
        assert_eq!(back.classes, map.classes);
    }

    #[test]
    fn single_conjunction_is_kept_single() {
        let pair = build_default_grammar_pair(&GrammarOptions::default());
        let (new, _) = resample_terminals(&pair, &WordList::bundled(), 3, 1).unwrap();
        assert_eq!(new.source.classes()[CONJ_CLASS].len(), 1);
    }

    #[test]
    fn exhaustion_reports_shortfall() {
        let pair = build_default_grammar_pair(&GrammarOptions::default());
        let words = WordList::from_text("zorp\nblick\n");
        match resample_terminals(&pair, &words, 0, 32) {
            Err(ResampleError::Exhausted {
                available,
                shortfall,
                needed,
            }) => {
                assert_eq!(available, 2);
                assert_eq!(shortfall, needed - 2);
            }
            other => panic!("{other:?}"),
        }
    }
}
