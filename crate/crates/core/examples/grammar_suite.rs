//! Generate a small grammar probe and look at it.
//!
//!     cargo run --example grammar_suite -- 42

use abstraction_probe::dataset::{dataset_stats, validate_dataset, DatasetRules, Split, SubProbe};
use abstraction_probe::flt::{generate_probe_suite, ProbeSuiteConfig, SplitCounts, WordList};

fn main() -> anyhow::Result<()> {
    let seed = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(42);
    let cfg = ProbeSuiteConfig {
        seed,
        sub_probe: SubProbe::Mod,
        counts: SplitCounts {
            train: 2_000,
            dev: 100,
            transfer: 1_000,
            test: 100,
        },
        ..Default::default()
    };
    let suite = generate_probe_suite(&cfg, &WordList::bundled())?;
    let ds = &suite.dataset;

    for (split, st) in dataset_stats(ds) {
        println!(
            "{split:<11} {:>5} examples  src {:>5.1}  tgt {:>5.1}",
            st.count, st.avg_source_len, st.avg_target_len
        );
    }
    for split in [
        Split::TrainA,
        Split::TransferB,
        Split::TestB,
        Split::ContrastC,
    ] {
        let e = &ds.split(split)[0];
        println!("\n[{split}] {}\n  -> {}", e.source, e.target);
    }

    let findings = validate_dataset(ds, &DatasetRules::for_dataset(ds));
    println!("\n{} validation findings", findings.len());
    Ok(())
}
