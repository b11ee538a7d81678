use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    map_node, render_source, resample_terminals, GrammarOptions, GrammarPair, MapError,
    ResampleError, TerminalMap, WordList,
};
use crate::dataset::{
    digest_hex, ExampleMeta, GrammarTag, Probe, ProbeDataset, ProbeExample, Split, SubProbe,
};
use crate::grammar::{sample_derivation_with_rng, Constraints, FeatureSummary, SampleError};
use crate::mutations::reverse_string;
use crate::seed::example_rng;

/// Attempts per dev example at drawing a sentence not already in `train_A`.
const DEV_ATTEMPTS: u32 = 1_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitCounts {
    pub train: usize,
    pub dev: usize,
    pub transfer: usize,
    pub test: usize,
}

impl Default for SplitCounts {
    fn default() -> Self {
        SplitCounts {
            train: 34_175,
            dev: 1_000,
            transfer: 24_155,
            test: 1_002,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProbeSuiteConfig {
    pub seed: u64,
    /// `com` or `mod`.
    pub sub_probe: SubProbe,
    pub counts: SplitCounts,
    /// Size of the resampled conjunction class (original one plus additions).
    pub n_conjunctions: usize,
    pub grammar: GrammarOptions,
    /// Also emit `contrast_C` (train sources with reversed targets).
    pub contrast: bool,
    /// Overrides the sub-probe's default `transfer_B` constraints.
    pub transfer_constraints: Option<Constraints>,
    /// Overrides the sub-probe's default `test_B` constraints.
    pub test_constraints: Option<Constraints>,
}

impl Default for ProbeSuiteConfig {
    fn default() -> Self {
        ProbeSuiteConfig {
            seed: 0,
            sub_probe: SubProbe::Com,
            counts: SplitCounts::default(),
            n_conjunctions: 32,
            grammar: GrammarOptions::default(),
            contrast: true,
            transfer_constraints: None,
            test_constraints: None,
        }
    }
}

impl ProbeSuiteConfig {
    pub fn transfer(&self) -> Constraints {
        self.transfer_constraints
            .clone()
            .unwrap_or_else(|| Constraints::recursion(0, 2).forbid("subj_mod"))
    }

    pub fn test(&self) -> Constraints {
        self.test_constraints
            .clone()
            .unwrap_or_else(|| match self.sub_probe {
                SubProbe::Mod => Constraints::recursion(0, 0)
                    .require("subj_mod")
                    .forbid("obj_mod"),
                _ => Constraints::recursion(3, 12)
                    .forbid("subj_mod")
                    .forbid("obj_mod"),
            })
    }

    pub fn validate(&self) -> Result<(), SuiteError> {
        let bad = |m: String| Err(SuiteError::Config(m));
        if !matches!(self.sub_probe, SubProbe::Com | SubProbe::Mod) {
            return bad(format!(
                "sub_probe must be com or mod, got {}",
                self.sub_probe
            ));
        }
        let c = &self.counts;
        if c.train == 0 || c.transfer == 0 || c.test == 0 {
            return bad("split counts must be positive".into());
        }
        if self.n_conjunctions == 0 {
            return bad("n_conjunctions must be at least 1".into());
        }
        if self.sub_probe == SubProbe::Com {
            let t = self.transfer();
            let max = t.max_recursion.unwrap_or(u32::MAX);
            if max >= self.test().min_recursion {
                return bad(format!(
                    "transfer_B max recursion {max} must be below test_B min recursion {}",
                    self.test().min_recursion
                ));
            }
        }
        Ok(())
    }

    /// Digest of the configuration and the word list contents.
    pub fn digest(&self, words: &WordList) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        digest_hex(format!("{json}\n{}", words.id).as_bytes())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Resample(#[from] ResampleError),
    #[error("{split} example {index}: {source}")]
    Sample {
        split: Split,
        index: usize,
        #[source]
        source: SampleError,
    },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("dev_A example {0}: every draw repeated a train_A sentence")]
    DevCollision(usize),
}

/// A generated suite together with the grammars it was drawn from.
#[derive(Debug, Clone)]
pub struct ProbeSuite {
    pub dataset: ProbeDataset,
    pub terminal_map: TerminalMap,
    pub original: GrammarPair,
    pub resampled: GrammarPair,
}

struct Drawn {
    source: String,
    target: String,
    features: FeatureSummary,
}

fn draw<R: Rng>(pair: &GrammarPair, rng: &mut R, c: &Constraints) -> Result<Drawn, SuiteError> {
    let d =
        sample_derivation_with_rng(&pair.source, rng, c).map_err(|source| SuiteError::Sample {
            split: Split::TrainA,
            index: 0,
            source,
        })?;
    Ok(Drawn {
        source: render_source(&d.root.tokens()),
        target: map_node(pair, &d.root)?.join(" "),
        features: d.features,
    })
}

fn example(split: Split, index: usize, sub: SubProbe, d: Drawn) -> ProbeExample {
    ProbeExample {
        id: format!("{split}-{index:06}"),
        split,
        probe: Probe::Grammar,
        sub_probe: sub,
        grammar_tag: GrammarTag::Original,
        source: d.source,
        target: d.target,
        prefix: None,
        meta: ExampleMeta {
            recursion_depth: Some(d.features.recursion),
            n_clauses: Some(d.features.recursion + 1),
            label: None,
        },
    }
}

fn with_index(split: Split, index: usize, e: SuiteError) -> SuiteError {
    match e {
        SuiteError::Sample { source, .. } => SuiteError::Sample {
            split,
            index,
            source,
        },
        other => other,
    }
}

fn split_examples(
    cfg: &ProbeSuiteConfig,
    pair: &GrammarPair,
    split: Split,
    n: usize,
    c: &Constraints,
) -> Result<Vec<ProbeExample>, SuiteError> {
    (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = example_rng(cfg.seed, split.as_str(), i as u64);
            let d = draw(pair, &mut rng, c).map_err(|e| with_index(split, i, e))?;
            Ok(example(split, i, cfg.sub_probe, d))
        })
        .collect()
}

/// Builds `train_A`, `dev_A` (and `contrast_C`) from the resampled pair and
/// `transfer_B`, `test_B` from the original pair.
///
/// Runs on the current rayon pool; the output does not depend on its size.
pub fn generate_probe_suite(
    cfg: &ProbeSuiteConfig,
    words: &WordList,
) -> Result<ProbeSuite, SuiteError> {
    cfg.validate()?;
    let original = super::build_default_grammar_pair(&cfg.grammar);
    let (resampled, terminal_map) =
        resample_terminals(&original, words, cfg.seed, cfg.n_conjunctions)?;

    let any = Constraints::default();
    let train = split_examples(cfg, &resampled, Split::TrainA, cfg.counts.train, &any)?;
    let seen: HashSet<&str> = train.iter().map(|e| e.source.as_str()).collect();
    let dev: Vec<ProbeExample> = (0..cfg.counts.dev)
        .into_par_iter()
        .map(|i| {
            let mut rng = example_rng(cfg.seed, Split::DevA.as_str(), i as u64);
            for _ in 0..DEV_ATTEMPTS {
                let d =
                    draw(&resampled, &mut rng, &any).map_err(|e| with_index(Split::DevA, i, e))?;
                if !seen.contains(d.source.as_str()) {
                    return Ok(example(Split::DevA, i, cfg.sub_probe, d));
                }
            }
            Err(SuiteError::DevCollision(i))
        })
        .collect::<Result<_, _>>()?;
    let transfer = split_examples(
        cfg,
        &original,
        Split::TransferB,
        cfg.counts.transfer,
        &cfg.transfer(),
    )?;
    let test = split_examples(cfg, &original, Split::TestB, cfg.counts.test, &cfg.test())?;

    let mut ds = ProbeDataset::new(
        Probe::Grammar,
        cfg.sub_probe,
        GrammarTag::Original,
        cfg.seed,
    );
    ds.config_digest = cfg.digest(words);
    if cfg.contrast {
        let contrast = train
            .iter()
            .enumerate()
            .map(|(i, e)| ProbeExample {
                id: format!("{}-{i:06}", Split::ContrastC),
                split: Split::ContrastC,
                grammar_tag: GrammarTag::Reverse,
                target: reverse_string(&e.target),
                ..e.clone()
            })
            .collect();
        ds.splits.insert(Split::ContrastC, contrast);
    }
    ds.splits.insert(Split::TrainA, train);
    ds.splits.insert(Split::DevA, dev);
    ds.splits.insert(Split::TransferB, transfer);
    ds.splits.insert(Split::TestB, test);
    Ok(ProbeSuite {
        dataset: ds,
        terminal_map,
        original,
        resampled,
    })
}
