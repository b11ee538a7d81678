//! Split a parallel corpus by source length into a fuzzy-grammar probe.

use abstraction_probe::dataset::{dataset_stats, fuzzy_split, FuzzyOptions, ParallelCorpus};

fn main() -> anyhow::Result<()> {
    let mut src = String::new();
    let mut tgt = String::new();
    for n in 1..=40 {
        let words: Vec<String> = (0..n).map(|i| format!("w{}", i % 7)).collect();
        src.push_str(&words.join(" "));
        src.push('\n');
        tgt.push_str(
            &words
                .iter()
                .map(|w| w.to_uppercase())
                .collect::<Vec<_>>()
                .join(" "),
        );
        tgt.push('\n');
    }
    let corpus = ParallelCorpus::from_lines(&src, &tgt)?;
    let opts = FuzzyOptions {
        transfer_max_len: 10,
        test_min_len: 30,
        train: Some(ParallelCorpus::from_lines("a b c\nd e\n", "A B C\nD E\n")?),
        contrast: true,
    };
    let split = fuzzy_split(&corpus, &opts)?;
    for (s, st) in dataset_stats(&split.dataset) {
        println!(
            "{s:<11} {:>3} examples, avg source {:.1}",
            st.count, st.avg_source_len
        );
    }
    println!("{} pairs between the thresholds", split.unassigned.len());
    Ok(())
}
