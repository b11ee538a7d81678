//! Mix several mutated grammars into one prefixed training corpus.

use abstraction_probe::flt::build_default_grammar_pair;
use abstraction_probe::mutations::{build_multigrammar_corpus, MutationName};

fn main() -> anyhow::Result<()> {
    let base = build_default_grammar_pair(&Default::default());
    let plan = [
        (MutationName::Original, 3),
        (MutationName::Reverse, 3),
        (MutationName::Coarse, 3),
    ];
    let ds = build_multigrammar_corpus(&base, &plan, 11)?;
    for e in ds.examples() {
        println!("{}\n  -> {}", e.source, e.target);
    }
    Ok(())
}
