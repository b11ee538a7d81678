//! One sentence under every grammar mutation.

use abstraction_probe::dataset::GrammarTag;
use abstraction_probe::flt::{build_default_grammar_pair, WordList};
use abstraction_probe::mutations::{sample_corpus, MutationName};

fn main() -> anyhow::Result<()> {
    let base = build_default_grammar_pair(&Default::default());
    let words = WordList::bundled();
    let original = &sample_corpus(&base, GrammarTag::Original, 1, 3, None, 0)?[0];
    println!("{}\n", original.source);

    for name in [
        MutationName::Original,
        MutationName::Reverse,
        MutationName::LocalReverse,
        MutationName::Coarse,
        MutationName::Nest,
        MutationName::Redundant,
    ] {
        let pair = name.apply(&base, &words, 3)?;
        let e = &sample_corpus(&pair, name.grammar_tag(), 1, 3, None, 0)?[0];
        if e.source != original.source {
            println!("{:<13} source: {}", name.as_str(), e.source);
        }
        println!("{:<13} {}", name.as_str(), e.target);
    }
    Ok(())
}
