//! Length-based splits of a natural-language parallel corpus.

use std::path::Path;

use super::{ExampleMeta, GrammarTag, Probe, ProbeDataset, ProbeExample, Split, SubProbe};

#[derive(Debug, thiserror::Error)]
pub enum FuzzyError {
    #[error("misaligned corpus: {src} source lines vs {tgt} target lines")]
    Misaligned { src: usize, tgt: usize },
    #[error("transfer_max_len ({transfer}) must be below test_min_len ({test})")]
    Thresholds { transfer: usize, test: usize },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    pub pairs: Vec<(String, String)>,
}

impl ParallelCorpus {
    pub fn from_lines(src: &str, tgt: &str) -> Result<Self, FuzzyError> {
        let s: Vec<&str> = src.lines().collect();
        let t: Vec<&str> = tgt.lines().collect();
        if s.len() != t.len() {
            return Err(FuzzyError::Misaligned {
                src: s.len(),
                tgt: t.len(),
            });
        }
        Ok(ParallelCorpus {
            pairs: s
                .into_iter()
                .zip(t)
                .map(|(a, b)| (a.trim().to_string(), b.trim().to_string()))
                .collect(),
        })
    }

    pub fn read(src: &Path, tgt: &Path) -> Result<Self, FuzzyError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|source| FuzzyError::Io {
                path: p.display().to_string(),
                source,
            })
        };
        Self::from_lines(&read(src)?, &read(tgt)?)
    }
}

#[derive(Debug, Clone)]
pub struct FuzzyOptions {
    /// Pairs whose source has at most this many tokens go to `transfer_B`.
    pub transfer_max_len: usize,
    /// Pairs whose source has at least this many tokens go to `test_B`.
    pub test_min_len: usize,
    /// Emit `contrast_C`: the training pairs with reversed target order.
    pub contrast: bool,
    /// Aiming-task pairs for `train_A`.
    pub train: Option<ParallelCorpus>,
}

impl Default for FuzzyOptions {
    fn default() -> Self {
        FuzzyOptions {
            transfer_max_len: 25,
            test_min_len: 60,
            contrast: false,
            train: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FuzzySplit {
    pub dataset: ProbeDataset,
    /// Line indices of probe pairs that fell between the thresholds or were
    /// empty.
    pub unassigned: Vec<usize>,
}

pub fn reverse_tokens(s: &str) -> String {
    let mut t: Vec<&str> = s.split_whitespace().collect();
    t.reverse();
    t.join(" ")
}

fn example(split: Split, i: usize, src: &str, tgt: &str) -> ProbeExample {
    ProbeExample {
        id: format!("{split}-{i:06}"),
        split,
        probe: Probe::Fuzzy,
        sub_probe: SubProbe::None,
        grammar_tag: if split == Split::ContrastC {
            GrammarTag::Reverse
        } else {
            GrammarTag::Original
        },
        source: src.split_whitespace().collect::<Vec<_>>().join(" "),
        target: tgt.split_whitespace().collect::<Vec<_>>().join(" "),
        prefix: None,
        meta: ExampleMeta::default(),
    }
}

pub fn fuzzy_split(corpus: &ParallelCorpus, opts: &FuzzyOptions) -> Result<FuzzySplit, FuzzyError> {
    if opts.transfer_max_len >= opts.test_min_len {
        return Err(FuzzyError::Thresholds {
            transfer: opts.transfer_max_len,
            test: opts.test_min_len,
        });
    }
    let mut ds = ProbeDataset::new(Probe::Fuzzy, SubProbe::None, GrammarTag::Original, 0);
    let mut transfer = Vec::new();
    let mut test = Vec::new();
    let mut unassigned = Vec::new();
    for (i, (s, t)) in corpus.pairs.iter().enumerate() {
        let n = s.split_whitespace().count();
        if n == 0 || t.split_whitespace().next().is_none() {
            unassigned.push(i);
        } else if n <= opts.transfer_max_len {
            transfer.push(example(Split::TransferB, i, s, t));
        } else if n >= opts.test_min_len {
            test.push(example(Split::TestB, i, s, t));
        } else {
            unassigned.push(i);
        }
    }
    ds.splits.insert(Split::TransferB, transfer);
    ds.splits.insert(Split::TestB, test);

    if let Some(train) = &opts.train {
        let usable = train
            .pairs
            .iter()
            .enumerate()
            .filter(|(_, (s, t))| !s.trim().is_empty() && !t.trim().is_empty());
        let a: Vec<ProbeExample> = usable
            .clone()
            .map(|(i, (s, t))| example(Split::TrainA, i, s, t))
            .collect();
        if opts.contrast {
            let c = usable
                .map(|(i, (s, t))| example(Split::ContrastC, i, s, &reverse_tokens(t)))
                .collect();
            ds.splits.insert(Split::ContrastC, c);
        }
        ds.splits.insert(Split::TrainA, a);
    }
    Ok(FuzzySplit {
        dataset: ds,
        unassigned,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(n: usize) -> String {
        vec!["w"; n].join(" ")
    }

    #[test]
    fn splits_by_source_length() {
        let corpus = ParallelCorpus {
            pairs: [5, 10, 80, 40]
                .iter()
                .map(|&n| (words(n), words(n)))
                .collect(),
        };
        let opts = FuzzyOptions {
            transfer_max_len: 20,
            test_min_len: 60,
            ..Default::default()
        };
        let out = fuzzy_split(&corpus, &opts).unwrap();
        let lens = |s: Split| -> Vec<usize> {
            out.dataset
                .split(s)
                .iter()
                .map(|e| e.source_tokens().count())
                .collect()
        };
        assert_eq!(lens(Split::TransferB), vec![5, 10]);
        assert_eq!(lens(Split::TestB), vec![80]);
        assert_eq!(out.unassigned, vec![3]);
    }

    #[test]
    fn contrast_reverses_training_targets() {
        let train = ParallelCorpus {
            pairs: vec![("a b c".into(), "x y z".into())],
        };
        let opts = FuzzyOptions {
            contrast: true,
            train: Some(train),
            ..Default::default()
        };
        let out = fuzzy_split(&ParallelCorpus::default(), &opts).unwrap();
        let c = &out.dataset.split(Split::ContrastC)[0];
        assert_eq!((c.source.as_str(), c.target.as_str()), ("a b c", "z y x"));
        assert_eq!(reverse_tokens(&reverse_tokens("x y z")), "x y z");
    }

    #[test]
    fn misaligned_and_bad_thresholds() {
        assert!(matches!(
            ParallelCorpus::from_lines("a\nb\n", "x\n"),
            Err(FuzzyError::Misaligned { src: 2, tgt: 1 })
        ));
        let opts = FuzzyOptions {
            transfer_max_len: 60,
            test_min_len: 60,
            ..Default::default()
        };
        assert!(fuzzy_split(&ParallelCorpus::default(), &opts).is_err());
    }
}
