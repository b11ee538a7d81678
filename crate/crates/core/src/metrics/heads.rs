use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Enc,
    DecSelf,
    DecCross,
}

impl Block {
    pub const ALL: [Block; 3] = [Block::Enc, Block::DecSelf, Block::DecCross];

    pub fn as_str(self) -> &'static str {
        match self {
            Block::Enc => "enc",
            Block::DecSelf => "dec_self",
            Block::DecCross => "dec_cross",
        }
    }
}

/// An attention head, rendered `enc.L3.H7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct HeadId {
    pub block: Block,
    pub layer: u32,
    pub head: u32,
}

impl HeadId {
    pub fn new(block: Block, layer: u32, head: u32) -> Self {
        HeadId { block, layer, head }
    }

    /// Every head of an encoder-decoder with `layers` layers per stack.
    pub fn all(layers: u32, heads: u32) -> Vec<HeadId> {
        Block::ALL
            .into_iter()
            .flat_map(|b| {
                (0..layers).flat_map(move |l| (0..heads).map(move |h| HeadId::new(b, l, h)))
            })
            .collect()
    }
}

impl fmt::Display for HeadId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.L{}.H{}", self.block.as_str(), self.layer, self.head)
    }
}

impl FromStr for HeadId {
    type Err = MetricsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MetricsError::BadHeadId(s.to_string());
        let mut parts = s.split('.');
        let block = match parts.next() {
            Some(b) => Block::ALL
                .into_iter()
                .find(|x| x.as_str() == b)
                .ok_or_else(bad)?,
            None => return Err(bad()),
        };
        let num = |p: Option<&str>, prefix: char| {
            p.and_then(|p| p.strip_prefix(prefix))
                .and_then(|n| n.parse::<u32>().ok())
                .ok_or_else(bad)
        };
        let layer = num(parts.next(), 'L')?;
        let head = num(parts.next(), 'H')?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(HeadId { block, layer, head })
    }
}

impl TryFrom<String> for HeadId {
    type Error = MetricsError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<HeadId> for String {
    fn from(h: HeadId) -> String {
        h.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvalSet {
    #[serde(rename = "transfer_B")]
    TransferB,
    #[serde(rename = "test_B")]
    TestB,
}

impl fmt::Display for EvalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalSet::TransferB => "transfer_B",
            EvalSet::TestB => "test_B",
        })
    }
}

/// `baseline` or `prune:<head>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Condition {
    Baseline,
    Prune(HeadId),
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Condition::Baseline => f.write_str("baseline"),
            Condition::Prune(h) => write!(f, "prune:{h}"),
        }
    }
}

impl FromStr for Condition {
    type Err = MetricsError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "baseline" => Ok(Condition::Baseline),
            _ => s
                .strip_prefix("prune:")
                .ok_or_else(|| MetricsError::BadCondition(s.to_string()))?
                .parse()
                .map(Condition::Prune),
        }
    }
}

impl TryFrom<String> for Condition {
    type Error = MetricsError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Condition> for String {
    fn from(c: Condition) -> String {
        c.to_string()
    }
}

/// Per-token log-probabilities of one gold target under one model condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogProbRecord {
    pub id: String,
    pub condition: Condition,
    pub eval_set: EvalSet,
    pub token_logprobs: Vec<f64>,
    pub n_tokens: usize,
}

/// `exp` of the negative mean token log-probability.
pub fn perplexity(r: &LogProbRecord) -> Result<f64, MetricsError> {
    let bad = |message: String| MetricsError::Record {
        id: r.id.clone(),
        message,
    };
    if r.token_logprobs.is_empty() {
        return Err(bad("no tokens".into()));
    }
    if r.n_tokens != r.token_logprobs.len() {
        return Err(bad(format!(
            "n_tokens {} but {} log-probs",
            r.n_tokens,
            r.token_logprobs.len()
        )));
    }
    if let Some((i, lp)) = r
        .token_logprobs
        .iter()
        .enumerate()
        .find(|(_, lp)| lp.is_nan() || **lp > 0.0)
    {
        return Err(bad(format!("log-prob {lp} at token {i} is not <= 0")));
    }
    let sum: f64 = r.token_logprobs.iter().sum();
    Ok((-sum / r.n_tokens as f64).exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpcRow {
    pub head: HeadId,
    pub delta_test: f64,
    pub delta_transfer: f64,
    pub dpc: f64,
    pub rank: usize,
}

/// Heads ordered by rank (1 = highest DPC).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpcReport {
    pub rows: Vec<DpcRow>,
}

impl DpcReport {
    pub fn write_csv(&self, w: impl std::io::Write) -> Result<(), csv::Error> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["head", "delta_test", "delta_transfer", "dpc", "rank"])?;
        for r in &self.rows {
            wtr.write_record([
                r.head.to_string(),
                r.delta_test.to_string(),
                r.delta_transfer.to_string(),
                r.dpc.to_string(),
                r.rank.to_string(),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`DpcReport::write_csv`].
    pub fn read_csv(r: impl std::io::Read) -> Result<Self, MetricsError> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut rows = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let bad = |m: &str| MetricsError::Record {
                id: format!("row {}", i + 1),
                message: m.to_string(),
            };
            let rec = rec.map_err(|e| bad(&e.to_string()))?;
            let num = |k: usize| -> Result<f64, MetricsError> {
                rec.get(k)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad("bad number"))
            };
            rows.push(DpcRow {
                head: rec.get(0).ok_or_else(|| bad("missing head"))?.parse()?,
                delta_test: num(1)?,
                delta_transfer: num(2)?,
                dpc: num(3)?,
                rank: rec
                    .get(4)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| bad("bad rank"))?,
            });
        }
        rows.sort_by_key(|r| r.rank);
        Ok(DpcReport { rows })
    }

    pub fn summary(&self, top: usize) -> String {
        let mut s = format!("{} heads ranked by DPC\n", self.rows.len());
        for r in self.rows.iter().take(top) {
            s.push_str(&format!(
                "{:>4}  {:<16} dpc {:>10.4}  (test {:+.4}, transfer {:+.4})\n",
                r.rank,
                r.head.to_string(),
                r.dpc,
                r.delta_test,
                r.delta_transfer
            ));
        }
        s
    }
}

type PplTable = BTreeMap<(Condition, EvalSet), BTreeMap<String, f64>>;

fn ppl_table(records: &[LogProbRecord]) -> Result<PplTable, MetricsError> {
    let mut t: PplTable = BTreeMap::new();
    for r in records {
        let ppl = perplexity(r)?;
        if t.entry((r.condition, r.eval_set))
            .or_default()
            .insert(r.id.clone(), ppl)
            .is_some()
        {
            return Err(MetricsError::DuplicateId(format!(
                "{} ({}, {})",
                r.id, r.condition, r.eval_set
            )));
        }
    }
    Ok(t)
}

/// Mean per-example PPL increase when each head is pruned, on `test_B` and
/// `transfer_B`, and their difference. Sums run in id order so the report
/// does not depend on record order.
pub fn dpc_report(records: &[LogProbRecord]) -> Result<DpcReport, MetricsError> {
    let table = ppl_table(records)?;
    let empty = BTreeMap::new();
    let base = |set| table.get(&(Condition::Baseline, set)).unwrap_or(&empty);
    if base(EvalSet::TestB).is_empty() && base(EvalSet::TransferB).is_empty() {
        return Err(MetricsError::NoBaseline);
    }
    let heads: BTreeSet<HeadId> = table
        .keys()
        .filter_map(|(c, _)| match c {
            Condition::Prune(h) => Some(*h),
            Condition::Baseline => None,
        })
        .collect();
    let mut rows = Vec::with_capacity(heads.len());
    for head in heads {
        let delta = |set: EvalSet| -> Result<f64, MetricsError> {
            let b = base(set);
            let p = table.get(&(Condition::Prune(head), set)).unwrap_or(&empty);
            let missing: Vec<String> = b.keys().filter(|k| !p.contains_key(*k)).cloned().collect();
            let extra: Vec<String> = p.keys().filter(|k| !b.contains_key(*k)).cloned().collect();
            if !missing.is_empty() || !extra.is_empty() || b.is_empty() {
                return Err(MetricsError::Coverage {
                    head: head.to_string(),
                    eval_set: set.to_string(),
                    missing,
                    extra,
                });
            }
            let sum: f64 = b.iter().map(|(id, ppl)| p[id] - ppl).sum();
            Ok(sum / b.len() as f64)
        };
        let delta_test = delta(EvalSet::TestB)?;
        let delta_transfer = delta(EvalSet::TransferB)?;
        rows.push(DpcRow {
            head,
            delta_test,
            delta_transfer,
            dpc: delta_test - delta_transfer,
            rank: 0,
        });
    }
    rows.sort_by(|a, b| b.dpc.total_cmp(&a.dpc).then(a.head.cmp(&b.head)));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(DpcReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HeadMode {
    Freeze,
    Prune,
}

/// Config file consumed by the model runner.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadSelection {
    pub heads: Vec<HeadId>,
    pub mode: HeadMode,
}

pub fn select_top_heads(
    report: &DpcReport,
    k: usize,
    mode: HeadMode,
) -> Result<HeadSelection, MetricsError> {
    if k > report.rows.len() {
        return Err(MetricsError::KOutOfRange {
            k,
            n: report.rows.len(),
        });
    }
    Ok(HeadSelection {
        heads: report.rows[..k].iter().map(|r| r.head).collect(),
        mode,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, cond: &str, set: EvalSet, lps: &[f64]) -> LogProbRecord {
        LogProbRecord {
            id: id.into(),
            condition: cond.parse().unwrap(),
            eval_set: set,
            token_logprobs: lps.to_vec(),
            n_tokens: lps.len(),
        }
    }

    #[test]
    fn head_ids() {
        let all = HeadId::all(12, 12);
        assert_eq!(all.len(), 432);
        assert_eq!(all.iter().collect::<BTreeSet<_>>().len(), 432);
        let h: HeadId = "dec_cross.L11.H0".parse().unwrap();
        assert_eq!(h.to_string(), "dec_cross.L11.H0");
        assert!("enc.L1".parse::<HeadId>().is_err());
        assert!("enc.L1.H2.x".parse::<HeadId>().is_err());
    }

    #[test]
    fn ppl_fixtures() {
        let r = rec("a", "baseline", EvalSet::TestB, &[0.0, 0.0]);
        assert_eq!(perplexity(&r).unwrap(), 1.0);
        let r = rec("a", "baseline", EvalSet::TestB, &[0.5f64.ln(), 0.5f64.ln()]);
        assert!((perplexity(&r).unwrap() - 2.0).abs() < 1e-12);
        let r = rec(
            "a",
            "baseline",
            EvalSet::TestB,
            &[0.1f64.ln(), 0.4f64.ln(), 0.25f64.ln()],
        );
        assert!((perplexity(&r).unwrap() - 4.6416).abs() < 1e-3);
        assert!(perplexity(&rec("a", "baseline", EvalSet::TestB, &[0.1])).is_err());
        assert!(perplexity(&rec("a", "baseline", EvalSet::TestB, &[])).is_err());
    }

    #[test]
    fn dpc_arithmetic_and_coverage() {
        // Single-token records with ppl = 1/p.
        let lp = |ppl: f64| [-(ppl.ln())];
        let recs = vec![
            rec("t", "baseline", EvalSet::TestB, &lp(10.0)),
            rec("t", "prune:enc.L0.H0", EvalSet::TestB, &lp(30.0)),
            rec("u", "baseline", EvalSet::TransferB, &lp(5.0)),
            rec("u", "prune:enc.L0.H0", EvalSet::TransferB, &lp(7.0)),
        ];
        let r = dpc_report(&recs).unwrap();
        assert!((r.rows[0].dpc - 18.0).abs() < 1e-9);
        let mut bad = recs.clone();
        bad.pop();
        assert!(matches!(
            dpc_report(&bad),
            Err(MetricsError::Coverage { .. })
        ));
    }

    #[test]
    fn ties_break_by_head_order() {
        let recs: Vec<LogProbRecord> = ["baseline", "prune:dec_self.L0.H1", "prune:enc.L2.H0"]
            .iter()
            .flat_map(|c| {
                [
                    rec("x", c, EvalSet::TestB, &[-1.0]),
                    rec("x", c, EvalSet::TransferB, &[-1.0]),
                ]
            })
            .collect();
        let r = dpc_report(&recs).unwrap();
        let sel = select_top_heads(&r, 1, HeadMode::Freeze).unwrap();
        assert_eq!(sel.heads[0].to_string(), "enc.L2.H0");
        assert!(select_top_heads(&r, 3, HeadMode::Prune).is_err());
        assert_eq!(
            serde_json::to_string(&sel).unwrap(),
            r#"{"heads":["enc.L2.H0"],"mode":"freeze"}"#
        );
    }
}
