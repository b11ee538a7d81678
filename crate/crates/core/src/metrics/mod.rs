//! Scoring and analysis of model outputs.

mod curves;
mod heads;
mod text;

use serde::{Deserialize, Serialize};

pub use curves::{
    analyze_learning_curves, select_checkpoint, CurvePoint, LearningCurve, PhaseAnalysis,
};
pub use heads::{
    dpc_report, perplexity, select_top_heads, Block, Condition, DpcReport, DpcRow, EvalSet, HeadId,
    HeadMode, HeadSelection, LogProbRecord,
};
pub use text::{bleu, exact_match, golds_from, normalize_whitespace, ExactMatch, Prediction};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("empty reference corpus")]
    EmptyReference,
    #[error("{hyps} hypotheses for {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("record {id}: {message}")]
    Record { id: String, message: String },
    #[error("head {head} on {eval_set}: ids differ from baseline (missing {missing:?}, extra {extra:?})")]
    Coverage {
        head: String,
        eval_set: String,
        missing: Vec<String>,
        extra: Vec<String>,
    },
    #[error("no baseline records")]
    NoBaseline,
    #[error("bad head id {0:?}")]
    BadHeadId(String),
    #[error("bad condition {0:?}")]
    BadCondition(String),
    #[error("k = {k} outside 0..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("score_full must be positive, got {0}")]
    NonPositiveFull(f64),
    #[error("curve: {0}")]
    Curve(String),
    #[error("no relative performance defined for an all-zero curve")]
    NoRelativePerformance,
}

/// `Δ(A⇒B)`: gain of the pretrained run over the control run.
pub fn transfer_gain(score_pretrained: f64, score_control: f64) -> f64 {
    score_pretrained - score_control
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MoaInputs {
    pub score_main: f64,
    pub score_control: f64,
    pub score_contrast: f64,
    pub score_full: f64,
}

/// Share of the full-data score attributable to abstraction.
pub fn moa(x: &MoaInputs) -> Result<f64, MetricsError> {
    if x.score_full.is_nan() || x.score_full <= 0.0 {
        return Err(MetricsError::NonPositiveFull(x.score_full));
    }
    Ok((x.score_main - x.score_control.max(x.score_contrast)) / x.score_full)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerdictThresholds {
    pub min_gain: f64,
    pub max_contrast_ratio: f64,
}

impl Default for VerdictThresholds {
    fn default() -> Self {
        VerdictThresholds {
            min_gain: 10.0,
            max_contrast_ratio: 0.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpectationVerdict {
    pub delta_main: f64,
    pub delta_contrast: f64,
    pub expectation1: Verdict,
    pub expectation2: Verdict,
}

/// Expectation 1 asks for a large gain from pretraining on A; expectation 2
/// for a contrast gain well below it. Without a positive main gain the
/// second one is not applicable.
pub fn expectation_verdict(
    score_main: f64,
    score_control: f64,
    score_contrast: f64,
    t: &VerdictThresholds,
) -> ExpectationVerdict {
    let delta_main = transfer_gain(score_main, score_control);
    let delta_contrast = transfer_gain(score_contrast, score_control);
    let pass = |b: bool| if b { Verdict::Pass } else { Verdict::Fail };
    ExpectationVerdict {
        delta_main,
        delta_contrast,
        expectation1: pass(delta_main >= t.min_gain),
        expectation2: if delta_main <= 0.0 {
            Verdict::NotApplicable
        } else {
            pass(delta_contrast <= t.max_contrast_ratio * delta_main)
        },
    }
}
