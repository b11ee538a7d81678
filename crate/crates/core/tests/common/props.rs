use abstraction_probe::dataset::{validate_dataset, DatasetRules, Split, SubProbe};
use abstraction_probe::flt::{
    build_default_grammar_pair, check_terminal_disjointness, default_exemptions,
    generate_probe_suite, map_node, GrammarPair, ProbeSuiteConfig, SplitCounts, WordList,
    CONJ_CLASS,
};
use abstraction_probe::grammar::{sample_derivation_with_rng, Constraints, DerivationNode};
use abstraction_probe::logic::{
    build_logic_suite, evaluate_expression, sample_expression, BindingKind, LogicCounts,
    LogicSuiteConfig, OperatorBinding, Sketch,
};
use abstraction_probe::mutations::reverse_string;
use abstraction_probe::seed::rng_from;

use super::postfix_eval;

fn suite(seed: u64, sub_probe: SubProbe) -> abstraction_probe::flt::ProbeSuite {
    let cfg = ProbeSuiteConfig {
        seed,
        sub_probe,
        counts: SplitCounts {
            train: 10_000,
            dev: 200,
            transfer: 3_000,
            test: 300,
        },
        ..Default::default()
    };
    generate_probe_suite(&cfg, &WordList::bundled()).unwrap()
}

pub fn reversal_is_an_involution() {
    let s = suite(4, SubProbe::Com);
    let train = s.dataset.split(Split::TrainA);
    assert_eq!(train.len(), 10_000);
    for e in train {
        assert_eq!(reverse_string(&reverse_string(&e.target)), e.target);
    }
    for (a, c) in train.iter().zip(s.dataset.split(Split::ContrastC)) {
        assert_eq!(c.source, a.source);
        assert_eq!(reverse_string(&c.target), a.target);
    }
}

fn clause_nodes<'a>(pair: &GrammarPair, n: &'a DerivationNode, out: &mut Vec<&'a DerivationNode>) {
    let lhs = &pair.source.production(n.production).lhs;
    if lhs == "CLAUSE" || lhs == "CPCLAUSE" {
        out.push(n);
        return;
    }
    for c in n.child_nodes() {
        clause_nodes(pair, c, out);
    }
}

/// The image of a chain is the images of its clauses joined by the images
/// of its conjunctions, in source order.
pub fn homomorphism_concatenation_law() {
    let pair = build_default_grammar_pair(&Default::default());
    let table = pair.terminal_table();
    let conj = &pair.source.classes()[CONJ_CLASS];
    let mut rng = rng_from(21);
    for _ in 0..10_000 {
        let d =
            sample_derivation_with_rng(&pair.source, &mut rng, &Constraints::default()).unwrap();
        let whole = map_node(&pair, &d.root).unwrap();
        let mut clauses = Vec::new();
        clause_nodes(&pair, &d.root, &mut clauses);
        let connectives: Vec<&String> = d
            .root
            .tokens()
            .iter()
            .filter(|t| conj.contains(t))
            .map(|t| &table[t])
            .collect();
        assert_eq!(connectives.len() + 1, clauses.len());
        let mut joined = Vec::new();
        for (i, c) in clauses.iter().enumerate() {
            if i > 0 {
                joined.push(connectives[i - 1].clone());
            }
            joined.extend(map_node(&pair, c).unwrap());
        }
        assert_eq!(joined, whole);
        assert_eq!(clauses.len() as u32, d.features.recursion + 1);
    }
}

pub fn train_and_probe_sets_share_no_terminals() {
    for sub in [SubProbe::Com, SubProbe::Mod] {
        let s = suite(9, sub);
        let ds = &s.dataset;
        let probe: Vec<_> = ds
            .split(Split::TransferB)
            .iter()
            .chain(ds.split(Split::TestB))
            .cloned()
            .collect();
        let report =
            check_terminal_disjointness(ds.split(Split::TrainA), &probe, &default_exemptions());
        assert!(report.is_disjoint(), "{:?}", report.shared);
        let findings = validate_dataset(ds, &DatasetRules::for_dataset(ds));
        assert!(findings.is_empty(), "{findings:?}");
    }
}

pub fn logic_suite_balance_operator_count_and_constraints() {
    let cfg = LogicSuiteConfig {
        seed: 12,
        sub_probe: SubProbe::Disc,
        counts: LogicCounts {
            train: 4_001,
            dev: 101,
            transfer: 2_001,
            supplement: 100,
            test: 301,
        },
        ..Default::default()
    };
    let ds = build_logic_suite(&cfg).unwrap();
    let alphabet = OperatorBinding::default().alphabet;
    let n_ops = |s: &str| {
        s.split(' ')
            .filter(|t| alphabet.iter().any(|a| a == t))
            .count()
    };
    for (split, ex) in &ds.splits {
        let t = ex.iter().filter(|e| e.target == "True").count();
        assert!(t.abs_diff(ex.len() - t) <= 1, "{split}");
        for e in ex {
            assert_eq!(e.meta.label.as_deref(), Some(e.target.as_str()));
        }
    }
    let transfer = ds.split(Split::TransferB);
    for e in &transfer[..2_001] {
        assert_eq!(n_ops(&e.source), 8);
        assert!(!e.source.split(' ').any(|t| t == "c3"));
    }
    let mut pairs = std::collections::BTreeSet::new();
    for e in &transfer[2_001..] {
        assert_eq!(n_ops(&e.source), 2);
        let ops: Vec<&str> = e
            .source
            .split(' ')
            .filter(|t| alphabet.iter().any(|a| a == t))
            .collect();
        pairs.insert((ops[0].to_string(), ops[1].to_string()));
    }
    assert_eq!(pairs.len(), 16);
    for e in ds.split(Split::TestB) {
        assert_eq!(n_ops(&e.source), 8);
        assert!(e.source.split(' ').any(|t| t == "c3"));
    }
    let findings = validate_dataset(&ds, &DatasetRules::for_dataset(&ds));
    assert!(findings.is_empty(), "{findings:?}");
    // Contrast labels are the train sources under the other tables.
    let b = OperatorBinding::default();
    for (a, c) in ds
        .split(Split::TrainA)
        .iter()
        .zip(ds.split(Split::ContrastC))
    {
        assert_eq!(a.source, c.source);
        assert_eq!(
            a.target == "True",
            evaluate_expression(&a.source, &b, BindingKind::Task).unwrap()
        );
        assert_eq!(
            c.target == "True",
            evaluate_expression(&c.source, &b, BindingKind::Contrast).unwrap()
        );
    }
}

pub fn evaluator_agrees_with_postfix_oracle() {
    let b = OperatorBinding::default();
    let none = Default::default();
    let mut rng = rng_from(77);
    for i in 0..100_000 {
        let sketch = if i % 2 == 0 {
            Sketch::Chain
        } else {
            Sketch::Tree
        };
        let e = sample_expression(sketch, 1 + i % 8, &b.alphabet, &mut rng, &none, &none).unwrap();
        let s = e.to_string();
        for (kind, task) in [(BindingKind::Task, true), (BindingKind::Contrast, false)] {
            assert_eq!(
                evaluate_expression(&s, &b, kind).unwrap(),
                postfix_eval(&s, task),
                "{s}"
            );
        }
    }
}
