use serde::{Deserialize, Serialize};

use super::MetricsError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub step: u64,
    pub score: f64,
}

/// Scores by training step; steps strictly increase and the curve is never empty.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LearningCurve {
    points: Vec<CurvePoint>,
}

impl LearningCurve {
    pub fn new(points: Vec<CurvePoint>) -> Result<Self, MetricsError> {
        if points.is_empty() {
            return Err(MetricsError::Curve("empty curve".into()));
        }
        if let Some(w) = points.windows(2).find(|w| w[1].step <= w[0].step) {
            return Err(MetricsError::Curve(format!(
                "steps must strictly increase ({} then {})",
                w[0].step, w[1].step
            )));
        }
        Ok(LearningCurve { points })
    }

    pub fn from_pairs(pairs: &[(u64, f64)]) -> Result<Self, MetricsError> {
        Self::new(
            pairs
                .iter()
                .map(|&(step, score)| CurvePoint { step, score })
                .collect(),
        )
    }

    /// Reads `step,score` rows; a header row is allowed.
    pub fn from_csv(r: impl std::io::Read) -> Result<Self, MetricsError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_reader(r);
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| MetricsError::Curve(e.to_string()))?;
            let parsed = (rec.get(0).map(str::trim), rec.get(1).map(str::trim));
            match parsed {
                (Some(s), Some(v)) => match (s.parse::<u64>(), v.parse::<f64>()) {
                    (Ok(step), Ok(score)) => points.push(CurvePoint { step, score }),
                    _ if i == 0 => continue,
                    _ => {
                        return Err(MetricsError::Curve(format!(
                            "row {}: bad step/score",
                            i + 1
                        )))
                    }
                },
                _ => {
                    return Err(MetricsError::Curve(format!(
                        "row {}: expected step,score",
                        i + 1
                    )))
                }
            }
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }

    pub fn max_score(&self) -> f64 {
        self.points
            .iter()
            .map(|p| p.score)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Earliest step reaching `threshold` of the curve's maximum.
    pub fn relative_step(&self, threshold: f64) -> Result<u64, MetricsError> {
        if let Some(p) = self.points.iter().find(|p| p.score < 0.0) {
            return Err(MetricsError::Curve(format!(
                "negative score at step {}",
                p.step
            )));
        }
        let max = self.max_score();
        if max <= 0.0 {
            return Err(MetricsError::NoRelativePerformance);
        }
        Ok(self
            .points
            .iter()
            .find(|p| p.score >= threshold * max)
            .expect("the maximum itself qualifies")
            .step)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseAnalysis {
    pub step_in_task: u64,
    pub step_cross_task: u64,
    pub phase_difference: i64,
}

pub fn analyze_learning_curves(
    in_task: &LearningCurve,
    cross_task: &LearningCurve,
    threshold: f64,
) -> Result<PhaseAnalysis, MetricsError> {
    let step_in_task = in_task.relative_step(threshold)?;
    let step_cross_task = cross_task.relative_step(threshold)?;
    Ok(PhaseAnalysis {
        step_in_task,
        step_cross_task,
        phase_difference: step_cross_task as i64 - step_in_task as i64,
    })
}

/// First step attaining the best score.
pub fn select_checkpoint(dev: &LearningCurve) -> u64 {
    let max = dev.max_score();
    dev.points
        .iter()
        .find(|p| p.score == max)
        .expect("non-empty")
        .step
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn checkpoint_is_first_argmax() {
        let c =
            LearningCurve::from_pairs(&[(10_000, 80.0), (20_000, 91.0), (30_000, 91.0)]).unwrap();
        assert_eq!(select_checkpoint(&c), 20_000);
    }

    #[test]
    fn relative_step() {
        let c = LearningCurve::from_pairs(&[(1000, 50.0), (2000, 95.0), (3000, 100.0)]).unwrap();
        assert_eq!(c.relative_step(0.9).unwrap(), 2000);
        let z = LearningCurve::from_pairs(&[(1, 0.0), (2, 0.0)]).unwrap();
        assert_eq!(
            z.relative_step(0.9),
            Err(MetricsError::NoRelativePerformance)
        );
        assert!(LearningCurve::from_pairs(&[(2, 0.0), (2, 1.0)]).is_err());
    }

    #[test]
    fn csv_with_header() {
        let c = LearningCurve::from_csv("step,score\n1000,3.5\n2000,4\n".as_bytes()).unwrap();
        assert_eq!(c.points().len(), 2);
    }
}
