use std::collections::BTreeMap;

use serde::Serialize;

use super::io::SplitSummary;
use super::{ProbeDataset, ProbeExample, Split};

pub fn round1(x: f64) -> f64 {
    (x * 10.0).round() / 10.0
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitStats {
    pub count: usize,
    pub avg_source_len: f64,
    pub avg_target_len: f64,
    /// `(#True, #False)` when the split carries labels.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_balance: Option<(usize, usize)>,
    pub recursion_histogram: BTreeMap<u32, usize>,
}

fn mean_len(lens: impl Iterator<Item = usize>, n: usize) -> f64 {
    if n == 0 {
        return 0.0;
    }
    round1(lens.sum::<usize>() as f64 / n as f64)
}

pub(crate) fn split_summary(examples: &[ProbeExample]) -> SplitSummary {
    let n = examples.len();
    SplitSummary {
        count: n,
        avg_src_len: mean_len(examples.iter().map(|e| e.source_tokens().count()), n),
        avg_tgt_len: mean_len(examples.iter().map(|e| e.target_tokens().count()), n),
    }
}

/// Token counts are whitespace splits; averages are rounded to one decimal.
pub fn dataset_stats(ds: &ProbeDataset) -> BTreeMap<Split, SplitStats> {
    ds.splits
        .iter()
        .map(|(split, ex)| {
            let s = split_summary(ex);
            let labels: Vec<&str> = ex.iter().filter_map(|e| e.meta.label.as_deref()).collect();
            let label_balance = (!labels.is_empty()).then(|| {
                let t = labels.iter().filter(|l| **l == "True").count();
                let f = labels.iter().filter(|l| **l == "False").count();
                (t, f)
            });
            let mut recursion_histogram = BTreeMap::new();
            for d in ex.iter().filter_map(|e| e.meta.recursion_depth) {
                *recursion_histogram.entry(d).or_insert(0) += 1;
            }
            (
                *split,
                SplitStats {
                    count: s.count,
                    avg_source_len: s.avg_src_len,
                    avg_target_len: s.avg_tgt_len,
                    label_balance,
                    recursion_histogram,
                },
            )
        })
        .collect()
}
