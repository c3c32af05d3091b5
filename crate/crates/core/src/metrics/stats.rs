use serde::{Deserialize, Serialize};

use super::MetricError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WordCountStats {
    pub mean: f64,
    /// Sample standard deviation (n - 1 denominator); 0 for a single text.
    pub sd: f64,
    pub n: usize,
}

/// Mean and sample standard deviation of whitespace word counts.
pub fn word_count_stats<S: AsRef<str>>(texts: &[S]) -> Result<WordCountStats, MetricError> {
    if texts.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let counts: Vec<f64> = texts
        .iter()
        .map(|t| t.as_ref().split_whitespace().count() as f64)
        .collect();
    let n = counts.len() as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let sd = if counts.len() == 1 {
        0.0
    } else {
        (counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(WordCountStats { mean, sd, n: counts.len() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn single_text() {
        let s = word_count_stats(&["one two three four five"]).unwrap();
        assert_eq!((s.mean, s.sd, s.n), (5.0, 0.0, 1));
    }

    #[test]
    fn two_texts() {
        let s = word_count_stats(&["w ".repeat(400), "w ".repeat(440)]).unwrap();
        assert_abs_diff_eq!(s.mean, 420.0);
        assert_abs_diff_eq!(s.sd, 28.28, epsilon = 0.01);
    }

    #[test]
    fn empty_list() {
        assert_eq!(word_count_stats::<&str>(&[]), Err(MetricError::EmptyInput));
    }

    proptest! {
        #[test]
        fn duplicating_the_list(counts in proptest::collection::vec(0usize..50, 1..20)) {
            let texts: Vec<String> = counts.iter().map(|c| "w ".repeat(*c)).collect();
            let doubled: Vec<String> = texts.iter().chain(&texts).cloned().collect();
            let a = word_count_stats(&texts).unwrap();
            let b = word_count_stats(&doubled).unwrap();
            prop_assert!((a.mean - b.mean).abs() < 1e-9);
            // sample sd over the doubled list: sqrt(2 * ss / (2n - 1))
            let n = counts.len() as f64;
            let ss: f64 = counts.iter().map(|&c| (c as f64 - a.mean).powi(2)).sum();
            prop_assert!((b.sd - (2.0 * ss / (2.0 * n - 1.0)).sqrt()).abs() < 1e-9);
            let all_equal = counts.iter().all(|&c| c == counts[0]);
            prop_assert_eq!(all_equal && counts.len() > 1, (a.sd - b.sd).abs() < 1e-12 && counts.len() > 1 && all_equal);
        }
    }
}
