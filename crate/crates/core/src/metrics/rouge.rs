use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::text::normalize_words;

/// ROUGE recall on the 0 to 100 scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScores {
    pub r1: f64,
    pub r2: f64,
    pub rl: f64,
}

fn ngram_counts(words: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    for gram in words.windows(n) {
        *counts.entry(gram).or_insert(0) += 1;
    }
    counts
}

fn ngram_recall(candidate: &[String], reference: &[String], n: usize) -> Result<f64, MetricError> {
    if n == 0 {
        return Err(MetricError::InvalidOrder);
    }
    if reference.len() < n {
        return Err(MetricError::ReferenceTooShort { needed: n, got: reference.len() });
    }
    let cand = ngram_counts(candidate, n);
    let refs = ngram_counts(reference, n);
    let overlap: usize = refs
        .iter()
        .map(|(gram, &r)| r.min(cand.get(gram).copied().unwrap_or(0)))
        .sum();
    let total = reference.len() + 1 - n;
    Ok(100.0 * overlap as f64 / total as f64)
}

/// Clipped n-gram recall of `candidate` against `reference`.
pub fn rouge_n_recall(candidate: &str, reference: &str, n: usize) -> Result<f64, MetricError> {
    ngram_recall(&normalize_words(candidate), &normalize_words(reference), n)
}

/// Length of the longest common subsequence, in two rows of memory.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn lcs_recall(candidate: &[String], reference: &[String]) -> Result<f64, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    Ok(100.0 * lcs_len(candidate, reference) as f64 / reference.len() as f64)
}

pub fn rouge_l_recall(candidate: &str, reference: &str) -> Result<f64, MetricError> {
    lcs_recall(&normalize_words(candidate), &normalize_words(reference))
}

pub fn rouge_scores(candidate: &str, reference: &str) -> Result<RougeScores, MetricError> {
    let c = normalize_words(candidate);
    let r = normalize_words(reference);
    Ok(RougeScores {
        r1: ngram_recall(&c, &r, 1)?,
        r2: ngram_recall(&c, &r, 2)?,
        rl: lcs_recall(&c, &r)?,
    })
}

/// Macro average over (candidate, reference) pairs.
pub fn mean_rouge<C, R>(pairs: &[(C, R)]) -> Result<RougeScores, MetricError>
where
    C: AsRef<str>,
    R: AsRef<str>,
{
    if pairs.is_empty() {
        return Err(MetricError::EmptyInput);
    }
    let mut sum = RougeScores { r1: 0.0, r2: 0.0, rl: 0.0 };
    for (c, r) in pairs {
        let s = rouge_scores(c.as_ref(), r.as_ref())?;
        sum.r1 += s.r1;
        sum.r2 += s.r2;
        sum.rl += s.rl;
    }
    let n = pairs.len() as f64;
    Ok(RougeScores { r1: sum.r1 / n, r2: sum.r2 / n, rl: sum.rl / n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn identity() {
        let t = "Patient admitted with stroke, given tPA.";
        assert_eq!(rouge_n_recall(t, t, 1).unwrap(), 100.0);
        assert_eq!(rouge_n_recall(t, t, 2).unwrap(), 100.0);
        assert_eq!(rouge_l_recall(t, t).unwrap(), 100.0);
    }

    #[test]
    fn hand_enumerated_overlap() {
        assert_abs_diff_eq!(rouge_n_recall("the cat sat", "the cat sat down", 1).unwrap(), 75.0);
        assert_abs_diff_eq!(rouge_n_recall("the cat sat", "the cat sat down", 2).unwrap(), 66.67, epsilon = 0.01);
        assert_abs_diff_eq!(rouge_l_recall("a b c", "a x c x").unwrap(), 50.0);
    }

    #[test]
    fn clipping() {
        // candidate repeats "the" four times but the reference has it twice
        assert_abs_diff_eq!(rouge_n_recall("the the the the", "the cat the dog", 1).unwrap(), 50.0);
    }

    #[test]
    fn degenerate_inputs() {
        assert_eq!(rouge_n_recall("x y", "a b", 1).unwrap(), 0.0);
        assert_eq!(rouge_l_recall("", "a b").unwrap(), 0.0);
        assert_eq!(rouge_l_recall("a", ""), Err(MetricError::EmptyReference));
        assert_eq!(rouge_n_recall("a", "a", 2), Err(MetricError::ReferenceTooShort { needed: 2, got: 1 }));
        assert_eq!(rouge_n_recall("a", "a", 0), Err(MetricError::InvalidOrder));
    }

    fn words() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec(prop::sample::select(vec!["a", "b", "c", "d"]), 0..20)
            .prop_map(|v| v.into_iter().map(String::from).collect())
    }

    fn naive_lcs(a: &[String], b: &[String]) -> usize {
        let mut t = vec![vec![0usize; b.len() + 1]; a.len() + 1];
        for i in 1..=a.len() {
            for j in 1..=b.len() {
                t[i][j] = if a[i - 1] == b[j - 1] { t[i - 1][j - 1] + 1 } else { t[i - 1][j].max(t[i][j - 1]) };
            }
        }
        t[a.len()][b.len()]
    }

    proptest! {
        #[test]
        fn lcs_matches_full_table(a in words(), b in words()) {
            prop_assert_eq!(lcs_len(&a, &b), naive_lcs(&a, &b));
        }

        #[test]
        fn bounded_and_monotone(c in words(), extra in words(), r in words()) {
            prop_assume!(r.len() >= 2);
            let cand = c.join(" ");
            let longer = format!("{cand} {}", extra.join(" "));
            let refr = r.join(" ");
            for n in 1..=2 {
                let base = rouge_n_recall(&cand, &refr, n).unwrap();
                prop_assert!((0.0..=100.0).contains(&base));
                prop_assert!(rouge_n_recall(&longer, &refr, n).unwrap() >= base);
            }
            let base = rouge_l_recall(&cand, &refr).unwrap();
            prop_assert!((0.0..=100.0).contains(&base));
            prop_assert!(rouge_l_recall(&longer, &refr).unwrap() >= base);
        }
    }
}
