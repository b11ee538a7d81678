mod common;

use std::collections::BTreeMap;

use abstraction_probe::dataset::GrammarTag;
use abstraction_probe::flt::{build_default_grammar_pair, map_node, WordList};
use abstraction_probe::grammar::{enumerate_language, sample_derivation_with_rng, Constraints};
use abstraction_probe::mutations::{
    coarse_string, local_reverse_string, nested_string, reverse_string, sample_corpus,
    MutationName, ADJ_CLASS,
};
use abstraction_probe::seed::example_rng;
use common::tiny_pair;

type StringMutation = (MutationName, fn(&str) -> String);

/// Target-side mutations computed on the grammar agree with the same
/// mutations applied to the original target strings.
#[test]
fn grammar_and_string_mutations_agree() {
    let base = build_default_grammar_pair(&Default::default());
    let words = WordList::bundled();
    let original = sample_corpus(&base, GrammarTag::Original, 2_000, 5, None, 0).unwrap();
    let cases: [StringMutation; 4] = [
        (MutationName::Reverse, |t| reverse_string(t)),
        (MutationName::Coarse, |t| coarse_string(t).unwrap()),
        (MutationName::LocalReverse, |t| {
            local_reverse_string(t).unwrap()
        }),
        (MutationName::Nest, |t| nested_string(t).unwrap()),
    ];
    for (name, f) in cases {
        let pair = name.apply(&base, &words, 5).unwrap();
        let mutated = sample_corpus(&pair, name.grammar_tag(), 2_000, 5, None, 0).unwrap();
        for (o, m) in original.iter().zip(&mutated) {
            assert_eq!(o.source, m.source);
            assert_eq!(f(&o.target), m.target, "{name}");
        }
    }
}

fn content_multiset(t: &str) -> BTreeMap<&str, usize> {
    let mut m = BTreeMap::new();
    for tok in t.split_whitespace() {
        if !matches!(tok, "(" | ")" | "," | "NONE") {
            *m.entry(tok).or_insert(0) += 1;
        }
    }
    m
}

#[test]
fn nesting_keeps_content_tokens() {
    let base = build_default_grammar_pair(&Default::default());
    for e in sample_corpus(&base, GrammarTag::Original, 5_000, 8, None, 0).unwrap() {
        let n = nested_string(&e.target).unwrap();
        assert_eq!(content_multiset(&n), content_multiset(&e.target));
        let k = e.meta.n_clauses.unwrap() as usize;
        assert_eq!(n.split(' ').rev().take_while(|t| *t == ")").count(), k);
    }
}

#[test]
fn coarse_token_count() {
    let base = build_default_grammar_pair(&Default::default());
    for e in sample_corpus(&base, GrammarTag::Original, 2_000, 3, None, 0).unwrap() {
        let k = e.meta.n_clauses.unwrap() as usize;
        assert_eq!(
            coarse_string(&e.target).unwrap().split(' ').count(),
            4 * k - 1
        );
    }
}

/// Removing the inserted adjectives from a Redundant source leaves a
/// sentence of the original language with the same target.
#[test]
fn redundant_adjectives_strip_to_original_language() {
    let small = tiny_pair(
        &[("ate", "EAT"), ("gave", "GIVE")],
        &["Emma"],
        &["cake", "dog"],
        &["on"],
    );
    let pair = MutationName::Redundant
        .apply(&small, &WordList::bundled(), 2)
        .unwrap();
    let adjectives = &pair.source.classes()[ADJ_CLASS];
    let language = enumerate_language(&small.source, 7, 100_000).unwrap();
    let c = Constraints::recursion(0, 0)
        .forbid("pp_nest")
        .forbid("subj_mod")
        .forbid("obj_mod");
    let mut saw_adjective = false;
    for i in 0..2_000 {
        let mut rng = example_rng(2, "redundant", i);
        let d = sample_derivation_with_rng(&pair.source, &mut rng, &c).unwrap();
        let toks = d.root.tokens();
        let stripped: Vec<String> = toks
            .iter()
            .filter(|t| !adjectives.contains(t))
            .cloned()
            .collect();
        saw_adjective |= stripped.len() < toks.len();
        assert!(language.contains(&stripped), "{stripped:?}");
        let target = map_node(&pair, &d.root).unwrap();
        let mut rng = example_rng(2, "redundant", i);
        let plain = (0..100_000)
            .map(|_| sample_derivation_with_rng(&small.source, &mut rng, &c).unwrap())
            .find(|d0| d0.root.tokens() == stripped)
            .unwrap();
        assert_eq!(map_node(&small, &plain.root).unwrap(), target);
    }
    assert!(saw_adjective);
}

#[test]
fn reversal_is_an_involution() {
    common::props::reversal_is_an_involution();
}

#[test]
fn homomorphism_concatenation_law() {
    common::props::homomorphism_concatenation_law();
}

#[test]
fn train_and_probe_sets_share_no_terminals() {
    common::props::train_and_probe_sets_share_no_terminals();
}

#[test]
fn logic_suite_balance_operator_count_and_constraints() {
    common::props::logic_suite_balance_operator_count_and_constraints();
}

#[test]
fn evaluator_agrees_with_postfix_oracle() {
    common::props::evaluator_agrees_with_postfix_oracle();
}
