use std::collections::HashSet;

use super::{LogProbDistribution, ScorerError, Token, TokenScorer, WordBoundary};
use crate::text::{normalize_word, truncate_front};

/// Interpolates a scorer with a uniform copy distribution over the vocabulary
/// tokens whose normalized form occurs in the source.
///
/// `P = (1 - w) * P_inner + w * P_copy`. When no vocabulary token occurs in the
/// source, or `w` is zero, the inner distribution passes through unchanged.
/// Only whole-word scorers with a known vocabulary can be wrapped.
pub struct SourceBiasedScorer<S> {
    inner: S,
    weight: f64,
    source_budget: usize,
}

impl<S: TokenScorer> SourceBiasedScorer<S> {
    pub fn new(inner: S, weight: f64, source_budget: usize) -> Result<Self, ScorerError> {
        if !(0.0..=1.0).contains(&weight) {
            return Err(ScorerError::InvalidDistribution(format!(
                "source weight {weight} outside [0, 1]"
            )));
        }
        if inner.vocabulary().is_none() || inner.word_boundary() != WordBoundary::WholeWords {
            return Err(ScorerError::Unavailable(
                "source biasing needs a whole-word scorer with a known vocabulary".into(),
            ));
        }
        Ok(Self {
            inner,
            weight,
            source_budget,
        })
    }

    pub fn inner(&self) -> &S {
        &self.inner
    }
}

impl<S: TokenScorer> TokenScorer for SourceBiasedScorer<S> {
    fn vocabulary(&self) -> Option<&[Token]> {
        self.inner.vocabulary()
    }

    fn end_token(&self) -> &str {
        self.inner.end_token()
    }

    fn word_boundary(&self) -> WordBoundary {
        self.inner.word_boundary()
    }

    fn is_concurrent(&self) -> bool {
        self.inner.is_concurrent()
    }

    fn score_next(&self, source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError> {
        let base = self.inner.score_next(source, prefix)?;
        if self.weight == 0.0 {
            return Ok(base);
        }
        let source = truncate_front(source, self.source_budget);
        let source_words: HashSet<String> =
            source.split_whitespace().filter_map(normalize_word).collect();
        let copyable: HashSet<&str> = self
            .vocabulary()
            .unwrap_or_default()
            .iter()
            .filter(|tok| &***tok != self.end_token())
            .filter(|tok| normalize_word(tok).is_some_and(|w| source_words.contains(&w)))
            .map(|tok| &**tok)
            .collect();
        if copyable.is_empty() {
            return Ok(base);
        }
        let copy_lp = (self.weight / copyable.len() as f64).ln();
        let keep = (1.0 - self.weight).ln();
        let entries = base
            .entries()
            .iter()
            .map(|(tok, lp)| {
                let mixed = if copyable.contains(&**tok) {
                    log_add(keep + lp, copy_lp)
                } else {
                    keep + lp
                };
                (tok.clone(), mixed)
            })
            .collect();
        LogProbDistribution::from_log_weights(entries)
    }
}

fn log_add(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}
