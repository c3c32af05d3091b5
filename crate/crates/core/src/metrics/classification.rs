use std::fmt;

use serde::{Deserialize, Serialize};

use super::MetricError;

/// Binary classification metrics with 1 (`true`) as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
}

impl ClassificationMetrics {
    /// Precision with no predicted positives is 1 if there were also no
    /// actual positives, else 0; recall with no actual positives mirrors
    /// that. F1 is 0 when precision and recall are both 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Result<Self, MetricError> {
        let total = tp + fp + fn_ + tn;
        if total == 0 {
            return Err(MetricError::EmptyInput);
        }
        let ratio = |num: usize, den: usize, other_miss: usize| {
            if den == 0 {
                if other_miss == 0 { 1.0 } else { 0.0 }
            } else {
                num as f64 / den as f64
            }
        };
        let precision = ratio(tp, tp + fp, fn_);
        let recall = ratio(tp, tp + fn_, fp);
        let f1 = if precision + recall == 0.0 {
            0.0
        } else {
            2.0 * precision * recall / (precision + recall)
        };
        Ok(Self {
            accuracy: (tp + tn) as f64 / total as f64,
            precision,
            recall,
            f1,
            tp,
            fp,
            fn_,
            tn,
        })
    }
}

impl fmt::Display for ClassificationMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "accuracy {:.4} precision {:.4} recall {:.4} f1 {:.4} (tp {} fp {} fn {} tn {})",
            self.accuracy, self.precision, self.recall, self.f1, self.tp, self.fp, self.fn_, self.tn
        )
    }
}

pub fn classification_report(predictions: &[bool], golds: &[bool]) -> Result<ClassificationMetrics, MetricError> {
    if predictions.len() != golds.len() {
        return Err(MetricError::LengthMismatch {
            predictions: predictions.len(),
            golds: golds.len(),
        });
    }
    let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
    for (&p, &g) in predictions.iter().zip(golds) {
        match (p, g) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => tn += 1,
        }
    }
    ClassificationMetrics::from_counts(tp, fp, fn_, tn)
}
