use rayon::prelude::*;

use super::{MutationError, MutationName};
use crate::dataset::{ExampleMeta, GrammarTag, Probe, ProbeDataset, ProbeExample, Split, SubProbe};
use crate::flt::{map_node, render_source, GrammarPair, WordList};
use crate::grammar::{sample_derivation_with_rng, Constraints};
use crate::seed::example_rng;

/// `count` `train_A` examples sampled from `pair`, tagged with `tag`. The
/// i-th example uses stream `multigrammar` index i, so corpora drawn from
/// pairs with the same source grammar share sources. With a prefix, the
/// prefix token starts every source.
pub fn sample_corpus(
    pair: &GrammarPair,
    tag: GrammarTag,
    count: usize,
    seed: u64,
    prefix: Option<&str>,
    id_offset: usize,
) -> Result<Vec<ProbeExample>, MutationError> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = example_rng(seed, "multigrammar", i as u64);
            let d = sample_derivation_with_rng(&pair.source, &mut rng, &Constraints::default())
                .map_err(|e| MutationError::Sample(e.to_string()))?;
            let target =
                map_node(pair, &d.root).map_err(|e| MutationError::Sample(e.to_string()))?;
            let rendered = render_source(&d.root.tokens());
            Ok(ProbeExample {
                id: format!("{}-{:06}", Split::TrainA, id_offset + i),
                split: Split::TrainA,
                probe: Probe::Grammar,
                sub_probe: SubProbe::None,
                grammar_tag: tag,
                source: match prefix {
                    Some(p) => format!("{p} {rendered}"),
                    None => rendered,
                },
                target: target.join(" "),
                prefix: prefix.map(str::to_string),
                meta: ExampleMeta {
                    recursion_depth: Some(d.features.recursion),
                    n_clauses: Some(d.features.recursion + 1),
                    label: None,
                },
            })
        })
        .collect()
}

/// A `train_A` corpus mixing several target grammars. Each source starts
/// with the grammar's name as a prefix token, and the grammars share
/// sources index by index.
pub fn build_multigrammar_corpus(
    base: &GrammarPair,
    plan: &[(MutationName, usize)],
    seed: u64,
) -> Result<ProbeDataset, MutationError> {
    let words = WordList::bundled();
    let mut examples = Vec::new();
    for &(name, count) in plan {
        if name == MutationName::Redundant {
            return Err(MutationError::NotForMultigrammar(name));
        }
        let pair = name.apply(base, &words, seed)?;
        let batch = sample_corpus(
            &pair,
            name.grammar_tag(),
            count,
            seed,
            Some(name.as_str()),
            examples.len(),
        )?;
        examples.extend(batch);
    }
    let mut ds = ProbeDataset::new(Probe::Grammar, SubProbe::None, GrammarTag::Mixed, seed);
    ds.splits.insert(Split::TrainA, examples);
    Ok(ds)
}
