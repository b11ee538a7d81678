use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::stats::split_summary;
use super::{GrammarTag, Probe, ProbeDataset, ProbeExample, Split, SubProbe};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, thiserror::Error)]
pub enum DatasetIoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("integrity error in split {split}: {message}")]
    Integrity { split: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> DatasetIoError + '_ {
    move |source| DatasetIoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSummary {
    pub count: usize,
    pub avg_src_len: f64,
    pub avg_tgt_len: f64,
}

/// Per-directory record of what was generated. Contains no timestamps, so
/// regenerating with the same inputs reproduces it byte for byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub probe: Probe,
    pub sub_probe: SubProbe,
    pub grammar_tag: GrammarTag,
    pub seed: u64,
    pub config_digest: String,
    pub splits: BTreeMap<Split, SplitSummary>,
}

impl Manifest {
    pub fn for_dataset(ds: &ProbeDataset) -> Self {
        Manifest {
            probe: ds.probe,
            sub_probe: ds.sub_probe,
            grammar_tag: ds.grammar_tag,
            seed: ds.seed,
            config_digest: ds.config_digest.clone(),
            splits: ds
                .splits
                .iter()
                .map(|(s, ex)| (*s, split_summary(ex)))
                .collect(),
        }
    }

    pub fn read(dir: &Path) -> Result<Self, DatasetIoError> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text).map_err(|e| DatasetIoError::Parse {
            path,
            line: e.line(),
            message: e.to_string(),
        })
    }
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<(), DatasetIoError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    for r in records {
        serde_json::to_writer(&mut w, r).expect("record serializes");
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DatasetIoError> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let ex: T = serde_json::from_str(&line).map_err(|e| DatasetIoError::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(ex);
    }
    Ok(out)
}

/// Writes one JSONL file per split plus `manifest.json`.
pub fn write_dataset(ds: &ProbeDataset, dir: &Path) -> Result<Manifest, DatasetIoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    for (split, examples) in &ds.splits {
        write_jsonl(&dir.join(split.file_name()), examples)?;
    }
    let manifest = Manifest::for_dataset(ds);
    let path = dir.join(MANIFEST_FILE);
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    fs::write(&path, text).map_err(io_err(&path))?;
    Ok(manifest)
}

/// Reads a dataset directory and checks every split against the manifest.
pub fn read_dataset(dir: &Path) -> Result<ProbeDataset, DatasetIoError> {
    let manifest = Manifest::read(dir)?;
    let mut splits = BTreeMap::new();
    for (split, summary) in &manifest.splits {
        let examples: Vec<ProbeExample> = read_jsonl(&dir.join(split.file_name()))?;
        if let Some(bad) = examples.iter().find(|e| e.split != *split) {
            return Err(DatasetIoError::Integrity {
                split: split.to_string(),
                message: format!("example {} is labeled {}", bad.id, bad.split),
            });
        }
        let actual = split_summary(&examples);
        if actual.count != summary.count {
            return Err(DatasetIoError::Integrity {
                split: split.to_string(),
                message: format!(
                    "manifest count {} but file has {}",
                    summary.count, actual.count
                ),
            });
        }
        if actual != *summary {
            return Err(DatasetIoError::Integrity {
                split: split.to_string(),
                message: format!(
                    "manifest lengths {}/{} but file has {}/{}",
                    summary.avg_src_len,
                    summary.avg_tgt_len,
                    actual.avg_src_len,
                    actual.avg_tgt_len
                ),
            });
        }
        splits.insert(*split, examples);
    }
    Ok(ProbeDataset {
        probe: manifest.probe,
        sub_probe: manifest.sub_probe,
        grammar_tag: manifest.grammar_tag,
        seed: manifest.seed,
        config_digest: manifest.config_digest,
        splits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::ExampleMeta;

    fn example(split: Split, i: usize, src: &str, tgt: &str) -> ProbeExample {
        ProbeExample {
            id: format!("{split}-{i:06}"),
            split,
            probe: Probe::Grammar,
            sub_probe: SubProbe::Com,
            grammar_tag: GrammarTag::Original,
            source: src.into(),
            target: tgt.into(),
            prefix: None,
            meta: ExampleMeta {
                recursion_depth: Some(0),
                n_clauses: Some(1),
                label: None,
            },
        }
    }

    fn small() -> ProbeDataset {
        let mut ds = ProbeDataset::new(Probe::Grammar, SubProbe::Com, GrammarTag::Original, 3);
        ds.splits.insert(
            Split::TrainA,
            vec![
                example(
                    Split::TrainA,
                    0,
                    "Emma froze .",
                    "FREEZE ( EMMA , NONE , NONE )",
                ),
                example(Split::TrainA, 1, "a b", "X Y Z"),
            ],
        );
        ds.splits.insert(
            Split::TestB,
            vec![example(
                Split::TestB,
                0,
                "Liam ate .",
                "EAT ( LIAM , NONE , NONE )",
            )],
        );
        ds
    }

    #[test]
    fn round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let ds = small();
        write_dataset(&ds, dir.path()).unwrap();
        let back = read_dataset(dir.path()).unwrap();
        assert_eq!(back, ds);
        let first = fs::read(dir.path().join("train_A.jsonl")).unwrap();
        let dir2 = tempfile::tempdir().unwrap();
        write_dataset(&back, dir2.path()).unwrap();
        assert_eq!(first, fs::read(dir2.path().join("train_A.jsonl")).unwrap());
    }

    #[test]
    fn jsonl_key_order_is_fixed() {
        let ex = example(Split::TrainA, 0, "a", "B");
        let line = serde_json::to_string(&ex).unwrap();
        assert_eq!(
            line,
            r#"{"id":"train_A-000000","split":"train_A","probe":"grammar","sub_probe":"com","grammar_tag":"original","source":"a","target":"B","meta":{"recursion_depth":0,"n_clauses":1}}"#
        );
    }

    #[test]
    fn corrupt_line_reports_file_and_line() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(), dir.path()).unwrap();
        let path = dir.path().join("train_A.jsonl");
        let mut text = fs::read_to_string(&path).unwrap();
        text.push_str("{not json\n");
        fs::write(&path, text).unwrap();
        match read_dataset(dir.path()) {
            Err(DatasetIoError::Parse { path: p, line, .. }) => {
                assert!(p.ends_with("train_A.jsonl"));
                assert_eq!(line, 3);
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn manifest_count_mismatch_names_split() {
        let dir = tempfile::tempdir().unwrap();
        write_dataset(&small(), dir.path()).unwrap();
        let mut m = Manifest::read(dir.path()).unwrap();
        m.splits.get_mut(&Split::TestB).unwrap().count = 2;
        fs::write(
            dir.path().join(MANIFEST_FILE),
            serde_json::to_string_pretty(&m).unwrap(),
        )
        .unwrap();
        match read_dataset(dir.path()) {
            Err(DatasetIoError::Integrity { split, .. }) => assert_eq!(split, "test_B"),
            other => panic!("expected integrity error, got {other:?}"),
        }
    }
}
