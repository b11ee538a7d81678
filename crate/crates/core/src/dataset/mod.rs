//! Probe examples, dataset files, statistics and validation.

mod fuzzy;
mod io;
mod stats;
mod validate;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use fuzzy::{fuzzy_split, reverse_tokens, FuzzyOptions, FuzzySplit, ParallelCorpus};
pub use io::{
    read_dataset, read_jsonl, write_dataset, write_jsonl, DatasetIoError, Manifest, SplitSummary,
};
pub use stats::{dataset_stats, round1, SplitStats};
pub use validate::{validate_dataset, DatasetFinding, DatasetRules, RecursionBound};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Split {
    #[serde(rename = "train_A")]
    TrainA,
    #[serde(rename = "dev_A")]
    DevA,
    #[serde(rename = "transfer_B")]
    TransferB,
    #[serde(rename = "test_B")]
    TestB,
    #[serde(rename = "contrast_C")]
    ContrastC,
}

impl Split {
    pub const ALL: [Split; 5] = [
        Split::TrainA,
        Split::DevA,
        Split::TransferB,
        Split::TestB,
        Split::ContrastC,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::TrainA => "train_A",
            Split::DevA => "dev_A",
            Split::TransferB => "transfer_B",
            Split::TestB => "test_B",
            Split::ContrastC => "contrast_C",
        }
    }

    pub fn file_name(self) -> String {
        format!("{}.jsonl", self.as_str())
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .into_iter()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown split {s:?}"))
    }
}

macro_rules! string_enum {
    ($name:ident { $($variant:ident => $s:literal),+ $(,)? }) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub enum $name {
            $(#[serde(rename = $s)] $variant),+
        }

        impl $name {
            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $s),+ }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($s => Ok($name::$variant),)+
                    _ => Err(format!(concat!("unknown ", stringify!($name), " {:?}"), s)),
                }
            }
        }
    };
}

string_enum!(Probe {
    Grammar => "grammar",
    Logic => "logic",
    Fuzzy => "fuzzy",
});

string_enum!(SubProbe {
    Com => "com",
    Mod => "mod",
    Conj => "conj",
    Disc => "disc",
    Alt => "alt",
    Joi => "joi",
    None => "none",
});

string_enum!(GrammarTag {
    Original => "original",
    Coarse => "coarse",
    LocalR => "localr",
    Nested => "nested",
    Reverse => "reverse",
    Redundant => "redundant",
    Mixed => "mixed",
});

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recursion_depth: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_clauses: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// One source/target pair. Field order is the JSONL key order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeExample {
    pub id: String,
    pub split: Split,
    pub probe: Probe,
    pub sub_probe: SubProbe,
    pub grammar_tag: GrammarTag,
    pub source: String,
    pub target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prefix: Option<String>,
    pub meta: ExampleMeta,
}

impl ProbeExample {
    pub fn source_tokens(&self) -> impl Iterator<Item = &str> {
        self.source.split_whitespace()
    }

    pub fn target_tokens(&self) -> impl Iterator<Item = &str> {
        self.target.split_whitespace()
    }
}

/// A probe suite: examples grouped by split plus the provenance recorded in
/// the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeDataset {
    pub probe: Probe,
    pub sub_probe: SubProbe,
    pub grammar_tag: GrammarTag,
    pub seed: u64,
    pub config_digest: String,
    pub splits: BTreeMap<Split, Vec<ProbeExample>>,
}

impl ProbeDataset {
    pub fn new(probe: Probe, sub_probe: SubProbe, grammar_tag: GrammarTag, seed: u64) -> Self {
        ProbeDataset {
            probe,
            sub_probe,
            grammar_tag,
            seed,
            config_digest: String::new(),
            splits: BTreeMap::new(),
        }
    }

    pub fn split(&self, s: Split) -> &[ProbeExample] {
        self.splits.get(&s).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn len(&self) -> usize {
        self.splits.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn examples(&self) -> impl Iterator<Item = &ProbeExample> {
        self.splits.values().flatten()
    }
}

/// `sha256` hex digest of arbitrary bytes.
pub fn digest_hex(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
