use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::dataset::ProbeExample;

/// One line of a predictions file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub prediction: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactMatch {
    pub accuracy: f64,
    pub n_correct: usize,
    pub n_gold: usize,
    /// Gold ids with no prediction; counted wrong.
    pub missing: Vec<String>,
}

/// Trims and collapses runs of whitespace to one space.
pub fn normalize_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

pub fn golds_from(examples: &[ProbeExample]) -> Vec<(String, String)> {
    examples
        .iter()
        .map(|e| (e.id.clone(), e.target.clone()))
        .collect()
}

fn index<'a>(
    pairs: impl Iterator<Item = (&'a str, &'a str)>,
) -> Result<HashMap<&'a str, &'a str>, MetricsError> {
    let mut m = HashMap::new();
    for (id, v) in pairs {
        if m.insert(id, v).is_some() {
            return Err(MetricsError::DuplicateId(id.to_string()));
        }
    }
    Ok(m)
}

/// Percentage of gold targets reproduced exactly, up to whitespace.
pub fn exact_match(
    predictions: &[Prediction],
    golds: &[(String, String)],
) -> Result<ExactMatch, MetricsError> {
    let preds = index(
        predictions
            .iter()
            .map(|p| (p.id.as_str(), p.prediction.as_str())),
    )?;
    index(golds.iter().map(|(i, g)| (i.as_str(), g.as_str())))?;
    let mut n_correct = 0;
    let mut missing = Vec::new();
    for (id, gold) in golds {
        match preds.get(id.as_str()) {
            Some(p) if normalize_whitespace(p) == normalize_whitespace(gold) => n_correct += 1,
            Some(_) => {}
            None => missing.push(id.clone()),
        }
    }
    let n_gold = golds.len();
    let accuracy = if n_gold == 0 {
        0.0
    } else {
        100.0 * n_correct as f64 / n_gold as f64
    };
    Ok(ExactMatch {
        accuracy,
        n_correct,
        n_gold,
        missing,
    })
}

fn ngrams<'a>(toks: &'a [&'a str], n: usize) -> BTreeMap<&'a [&'a str], usize> {
    let mut m = BTreeMap::new();
    for w in toks.windows(n) {
        *m.entry(w).or_insert(0) += 1;
    }
    m
}

/// Corpus BLEU on a 0–100 scale: clipped 1- to 4-gram precisions with
/// uniform weights, brevity penalty, whitespace tokens, no smoothing.
pub fn bleu(hypotheses: &[&str], references: &[&str]) -> Result<f64, MetricsError> {
    if references.is_empty() {
        return Err(MetricsError::EmptyReference);
    }
    if hypotheses.len() != references.len() {
        return Err(MetricsError::LengthMismatch {
            hyps: hypotheses.len(),
            refs: references.len(),
        });
    }
    let mut matches = [0usize; 4];
    let mut totals = [0usize; 4];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (h, r) in hypotheses.iter().zip(references) {
        let h: Vec<&str> = h.split_whitespace().collect();
        let r: Vec<&str> = r.split_whitespace().collect();
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=4 {
            let rc = ngrams(&r, n);
            for (g, c) in ngrams(&h, n) {
                matches[n - 1] += c.min(rc.get(g).copied().unwrap_or(0));
            }
            totals[n - 1] += h.len().saturating_sub(n - 1);
        }
    }
    if hyp_len == 0 || matches.contains(&0) {
        return Ok(0.0);
    }
    let log_p: f64 = (0..4)
        .map(|i| (matches[i] as f64 / totals[i] as f64).ln())
        .sum::<f64>()
        / 4.0;
    let bp = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(100.0 * bp * log_p.exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(id: &str, s: &str) -> Prediction {
        Prediction {
            id: id.into(),
            prediction: s.into(),
        }
    }

    #[test]
    fn em_counts_missing_and_normalizes() {
        let golds = vec![
            ("a".to_string(), "X ( Y )".to_string()),
            ("b".to_string(), "Z".to_string()),
        ];
        let r = exact_match(&[p("a", "  X  (  Y )\t")], &golds).unwrap();
        assert_eq!(r.accuracy, 50.0);
        assert_eq!(r.missing, vec!["b".to_string()]);
        assert!(matches!(
            exact_match(&[p("a", "x"), p("a", "y")], &golds),
            Err(MetricsError::DuplicateId(_))
        ));
    }

    #[test]
    fn bleu_edges() {
        let refs = ["the cat sat on the mat", "a b c d e"];
        assert!((bleu(&refs, &refs).unwrap() - 100.0).abs() < 1e-9);
        assert_eq!(bleu(&["", ""], &refs).unwrap(), 0.0);
        assert!(bleu(&[], &[]).is_err());
    }
}
