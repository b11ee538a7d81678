use std::collections::{BTreeSet, HashSet};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    evaluate_expression, expression_with_ops, lit_str, sample_expression, BindingKind, LogicError,
    LogicExpr, OperatorBinding, Sketch,
};
use crate::dataset::{
    digest_hex, ExampleMeta, GrammarTag, Probe, ProbeDataset, ProbeExample, Split, SubProbe,
};
use crate::seed::example_rng;

const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogicCounts {
    pub train: usize,
    pub dev: usize,
    pub transfer: usize,
    pub supplement: usize,
    pub test: usize,
}

impl Default for LogicCounts {
    fn default() -> Self {
        LogicCounts {
            train: 100_000,
            dev: 1_000,
            transfer: 20_000,
            supplement: 100,
            test: 1_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogicSuiteConfig {
    pub seed: u64,
    pub sub_probe: SubProbe,
    pub n_ops: usize,
    pub counts: LogicCounts,
    pub contrast: bool,
    pub binding: OperatorBinding,
}

impl Default for LogicSuiteConfig {
    fn default() -> Self {
        LogicSuiteConfig {
            seed: 0,
            sub_probe: SubProbe::Conj,
            n_ops: 8,
            counts: LogicCounts::default(),
            contrast: true,
            binding: OperatorBinding::default(),
        }
    }
}

impl LogicSuiteConfig {
    pub fn probed_symbol(&self) -> Result<String, LogicError> {
        self.binding
            .symbol_for_sub_probe(self.sub_probe)
            .map(str::to_string)
            .ok_or_else(|| {
                LogicError::Config(format!("{} is not an operation sub-probe", self.sub_probe))
            })
    }

    pub fn digest(&self) -> String {
        digest_hex(
            serde_json::to_string(self)
                .expect("config serializes")
                .as_bytes(),
        )
    }
}

/// Label wanted at position `i`: alternating, so every prefix is balanced.
fn task_label(i: usize) -> bool {
    i.is_multiple_of(2)
}

/// Contrast label for `train_A`: the sequence T,F,F,T keeps the contrast
/// labels balanced as well while the task labels alternate.
fn contrast_label(i: usize) -> bool {
    matches!(i % 4, 0 | 3)
}

struct Draw<'a> {
    cfg: &'a LogicSuiteConfig,
    split: Split,
}

impl Draw<'_> {
    fn example(&self, index: usize, expr: &LogicExpr, label: bool) -> ProbeExample {
        let target = lit_str(label).to_string();
        ProbeExample {
            id: format!("{}-{index:06}", self.split),
            split: self.split,
            probe: Probe::Logic,
            sub_probe: self.cfg.sub_probe,
            grammar_tag: GrammarTag::Original,
            source: expr.to_string(),
            target: target.clone(),
            prefix: None,
            meta: ExampleMeta {
                label: Some(target),
                ..Default::default()
            },
        }
    }

    fn run(
        &self,
        range: std::ops::Range<usize>,
        draw: impl Fn(usize, &mut ChaCha8Rng) -> Result<LogicExpr, LogicError> + Send + Sync,
        accept: impl Fn(usize, &LogicExpr) -> Result<Option<bool>, LogicError> + Send + Sync,
    ) -> Result<Vec<ProbeExample>, LogicError> {
        range
            .into_par_iter()
            .map(|i| {
                let mut rng = example_rng(self.cfg.seed, self.split.as_str(), i as u64);
                for _ in 0..MAX_ATTEMPTS {
                    let e = draw(i, &mut rng)?;
                    if let Some(label) = accept(i, &e)? {
                        return Ok(self.example(i, &e, label));
                    }
                }
                Err(LogicError::Unsatisfiable(format!(
                    "{}-{i:06}: no expression with the wanted label in {MAX_ATTEMPTS} attempts",
                    self.split
                )))
            })
            .collect()
    }
}

/// Builds `train_A`, `dev_A`, `transfer_B`, `test_B` and (optionally)
/// `contrast_C`. Labels are balanced in every split.
pub fn build_logic_suite(cfg: &LogicSuiteConfig) -> Result<ProbeDataset, LogicError> {
    let probed = cfg.probed_symbol()?;
    let b = &cfg.binding;
    let alphabet = &b.alphabet;
    let n = cfg.n_ops;
    let none = BTreeSet::new();
    let just_probed: BTreeSet<String> = [probed.clone()].into();

    let chain =
        |_, rng: &mut ChaCha8Rng| sample_expression(Sketch::Chain, n, alphabet, rng, &none, &none);
    let task = |e: &LogicExpr| e.evaluate(b, BindingKind::Task);

    let train = Draw {
        cfg,
        split: Split::TrainA,
    }
    .run(0..cfg.counts.train, chain, |i, e| {
        let t = task(e)?;
        let c = e.evaluate(b, BindingKind::Contrast)?;
        Ok((t == task_label(i) && c == contrast_label(i)).then_some(t))
    })?;

    let seen: HashSet<&str> = train.iter().map(|e| e.source.as_str()).collect();
    let dev = Draw {
        cfg,
        split: Split::DevA,
    }
    .run(0..cfg.counts.dev, chain, |i, e| {
        let t = task(e)?;
        Ok((t == task_label(i) && !seen.contains(e.to_string().as_str())).then_some(t))
    })?;

    let transfer_draw = Draw {
        cfg,
        split: Split::TransferB,
    };
    let mut transfer = transfer_draw.run(
        0..cfg.counts.transfer,
        |_, rng: &mut ChaCha8Rng| {
            sample_expression(Sketch::Tree, n, alphabet, rng, &just_probed, &none)
        },
        |i, e| {
            let t = task(e)?;
            Ok((t == task_label(i)).then_some(t))
        },
    )?;
    // Two-operator supplements cycle through every ordered operator pair.
    let offset = cfg.counts.transfer;
    let pairs: Vec<[String; 2]> = alphabet
        .iter()
        .flat_map(|x| alphabet.iter().map(move |y| [x.clone(), y.clone()]))
        .collect();
    let supplement = transfer_draw.run(
        offset..offset + cfg.counts.supplement,
        |i, rng: &mut ChaCha8Rng| Ok(expression_with_ops(&pairs[(i - offset) % pairs.len()], rng)),
        |i, e| {
            let t = task(e)?;
            Ok((t == task_label(i)).then_some(t))
        },
    )?;
    transfer.extend(supplement);

    let test = Draw {
        cfg,
        split: Split::TestB,
    }
    .run(
        0..cfg.counts.test,
        |_, rng: &mut ChaCha8Rng| {
            sample_expression(Sketch::Tree, n, alphabet, rng, &none, &just_probed)
        },
        |i, e| {
            let t = task(e)?;
            Ok((t == task_label(i)).then_some(t))
        },
    )?;

    let mut ds = ProbeDataset::new(Probe::Logic, cfg.sub_probe, GrammarTag::Original, cfg.seed);
    ds.config_digest = cfg.digest();
    if cfg.contrast {
        let mut c = contrast_rebind(&train, b)?;
        for (i, e) in c.iter_mut().enumerate() {
            e.split = Split::ContrastC;
            e.id = format!("{}-{i:06}", Split::ContrastC);
        }
        ds.splits.insert(Split::ContrastC, c);
    }
    ds.splits.insert(Split::TrainA, train);
    ds.splits.insert(Split::DevA, dev);
    ds.splits.insert(Split::TransferB, transfer);
    ds.splits.insert(Split::TestB, test);
    Ok(ds)
}

/// Same examples with labels recomputed under the contrast tables.
pub fn contrast_rebind(
    examples: &[ProbeExample],
    binding: &OperatorBinding,
) -> Result<Vec<ProbeExample>, LogicError> {
    examples
        .iter()
        .enumerate()
        .map(|(line, e)| {
            let v = evaluate_expression(&e.source, binding, BindingKind::Contrast).map_err(
                |source| LogicError::Line {
                    line: line + 1,
                    source: Box::new(source),
                },
            )?;
            let label = lit_str(v).to_string();
            let mut out = e.clone();
            out.target = label.clone();
            out.meta.label = Some(label);
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> LogicSuiteConfig {
        LogicSuiteConfig {
            seed: 3,
            counts: LogicCounts {
                train: 203,
                dev: 21,
                transfer: 101,
                supplement: 17,
                test: 33,
            },
            ..Default::default()
        }
    }

    #[test]
    fn counts_balance_and_constraints() {
        let ds = build_logic_suite(&small()).unwrap();
        assert_eq!(ds.split(Split::TransferB).len(), 118);
        for (split, ex) in &ds.splits {
            let t = ex.iter().filter(|e| e.target == "True").count() as i64;
            assert!((2 * t - ex.len() as i64).abs() <= 1, "{split}");
        }
        for e in &ds.split(Split::TransferB)[..101] {
            assert!(!e.source.split(' ').any(|t| t == "a1"));
            assert_eq!(e.source.split(' ').filter(|t| t.len() == 2).count(), 8);
        }
        assert!(ds
            .split(Split::TestB)
            .iter()
            .all(|e| e.source.split(' ').any(|t| t == "a1")));
        let a = ds.split(Split::TrainA);
        let c = ds.split(Split::ContrastC);
        assert!(a.iter().zip(c).all(|(x, y)| x.source == y.source));
    }

    #[test]
    fn rebind_reports_line() {
        let mut ex = build_logic_suite(&small())
            .unwrap()
            .split(Split::DevA)
            .to_vec();
        ex[4].source = "True a1".into();
        match contrast_rebind(&ex, &OperatorBinding::default()) {
            Err(LogicError::Line { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }
}
