use serde::{Deserialize, Serialize};

use super::MetricError;

/// Consistency ICC from a two-way model over subjects (rows) and raters
/// (columns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IccResult {
    pub icc_single: f64,
    /// Not clamped: it falls below -1 when the error mean square is large
    /// relative to the between-subject one.
    pub icc_average: f64,
    pub ms_rows: f64,
    pub ms_error: f64,
    pub subjects: usize,
    pub raters: usize,
}

pub fn icc_consistency<R: AsRef<[f64]>>(ratings: &[R]) -> Result<IccResult, MetricError> {
    let n = ratings.len();
    let k = ratings.first().map_or(0, |r| r.as_ref().len());
    for (row, r) in ratings.iter().enumerate() {
        let got = r.as_ref().len();
        if got != k {
            return Err(MetricError::RaggedRatings { row, expected: k, got });
        }
        if r.as_ref().iter().any(|x| !x.is_finite()) {
            return Err(MetricError::NonFiniteRating);
        }
    }
    if n < 2 {
        return Err(MetricError::TooFewSubjects(n));
    }
    if k < 2 {
        return Err(MetricError::TooFewRaters(k));
    }

    let (nf, kf) = (n as f64, k as f64);
    let grand = ratings.iter().flat_map(|r| r.as_ref()).sum::<f64>() / (nf * kf);
    let row_means: Vec<f64> = ratings.iter().map(|r| r.as_ref().iter().sum::<f64>() / kf).collect();
    let col_means: Vec<f64> = (0..k)
        .map(|j| ratings.iter().map(|r| r.as_ref()[j]).sum::<f64>() / nf)
        .collect();

    let ss_rows = kf * row_means.iter().map(|m| (m - grand).powi(2)).sum::<f64>();
    let mut ss_error = 0.0;
    for (r, rm) in ratings.iter().zip(&row_means) {
        for (x, cm) in r.as_ref().iter().zip(&col_means) {
            ss_error += (x - rm - cm + grand).powi(2);
        }
    }
    let ms_rows = ss_rows / (nf - 1.0);
    let ms_error = ss_error / ((nf - 1.0) * (kf - 1.0));

    let scale = ratings
        .iter()
        .flat_map(|r| r.as_ref())
        .fold(1.0f64, |m, x| m.max(x * x));
    if ms_rows <= 1e-12 * scale {
        return Err(MetricError::DegenerateRatings);
    }
    Ok(IccResult {
        icc_single: (ms_rows - ms_error) / (ms_rows + (kf - 1.0) * ms_error),
        icc_average: (ms_rows - ms_error) / ms_rows,
        ms_rows,
        ms_error,
        subjects: n,
        raters: k,
    })
}
