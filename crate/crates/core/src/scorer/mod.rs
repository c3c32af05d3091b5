//! Next-token scoring contract used by the decoder.
//!
//! A [`TokenScorer`] maps a source text and a token prefix to a natural-log
//! probability distribution over next tokens. Two implementations ship here:
//! a smoothed word n-gram model and a client for external model processes
//! speaking the newline-delimited JSON protocol in [`wire`].

mod external;
mod mix;
mod ngram;
pub mod wire;

use std::sync::Arc;
use std::time::Duration;

use thiserror::Error;

pub use external::{connect_external_scorer, Endpoint, ExternalConfig, ExternalScorer};
pub use mix::SourceBiasedScorer;
pub use ngram::{train_ngram_scorer, NgramScorer};

/// A token as emitted by a scorer. Cheap to clone.
pub type Token = Arc<str>;

/// Default end-of-sequence token name.
pub const END_TOKEN: &str = "<end>";

/// Default conditioning budget in whitespace tokens.
pub const DEFAULT_SOURCE_BUDGET: usize = 1024;

const MASS_TOLERANCE: f64 = 1e-9;
const POSITIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ScorerError {
    #[error("token {0:?} is not in the scorer vocabulary")]
    UnknownToken(String),
    #[error("scorer unavailable: {0}")]
    Unavailable(String),
    #[error("handshake failed: {0}")]
    HandshakeFailure(String),
    #[error("protocol violation: {0}")]
    ProtocolViolation(String),
    #[error("scorer did not answer within {0:?}")]
    Timeout(Duration),
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("n-gram order must be at least 1, got {0}")]
    InvalidOrder(usize),
    #[error("smoothing constant must be positive and finite, got {0}")]
    InvalidSmoothing(f64),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
}

/// How token strings map onto words.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WordBoundary {
    /// Every token is one or more complete words.
    WholeWords,
    /// Subword tokens; a leading space, `Ġ` or `▁` starts a new word.
    LeadingMarker,
}

impl WordBoundary {
    /// Splits a leading word-start marker off `token`.
    pub fn strip_marker(token: &str) -> Option<&str> {
        let mut chars = token.chars();
        match chars.next() {
            Some(' ' | 'Ġ' | '▁') => Some(chars.as_str()),
            _ => None,
        }
    }
}

/// Natural-log probabilities over next tokens. Tokens not listed have probability 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LogProbDistribution {
    entries: Vec<(Token, f64)>,
}

impl LogProbDistribution {
    /// Wraps already-normalized entries, checking total mass and signs.
    pub fn new(entries: Vec<(Token, f64)>) -> Result<Self, ScorerError> {
        let dist = Self { entries };
        dist.check()?;
        Ok(dist)
    }

    /// Renormalizes arbitrary log weights with log-sum-exp.
    pub fn from_log_weights(entries: Vec<(Token, f64)>) -> Result<Self, ScorerError> {
        let max = entries
            .iter()
            .map(|(_, lp)| *lp)
            .fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(ScorerError::InvalidDistribution(
                "no finite log weight".into(),
            ));
        }
        let lse = max + entries.iter().map(|(_, lp)| (lp - max).exp()).sum::<f64>().ln();
        let entries = entries
            .into_iter()
            .map(|(t, lp)| (t, (lp - lse).min(0.0)))
            .collect();
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[(Token, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn log_prob(&self, token: &str) -> f64 {
        self.entries
            .iter()
            .find(|(t, _)| &**t == token)
            .map_or(f64::NEG_INFINITY, |(_, lp)| *lp)
    }

    pub fn total_mass(&self) -> f64 {
        self.entries.iter().map(|(_, lp)| lp.exp()).sum()
    }

    /// Mass within 1e-9 of one, every entry at most 1e-12 above zero, no NaN.
    pub fn check(&self) -> Result<(), ScorerError> {
        if let Some((t, lp)) = self
            .entries
            .iter()
            .find(|(_, lp)| lp.is_nan() || *lp > POSITIVE_TOLERANCE)
        {
            return Err(ScorerError::InvalidDistribution(format!(
                "token {t:?} has log probability {lp}"
            )));
        }
        let mass = self.total_mass();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(ScorerError::InvalidDistribution(format!(
                "probabilities sum to {mass}"
            )));
        }
        Ok(())
    }
}

/// Scores the next token given the source text and the tokens generated so far.
pub trait TokenScorer: Send + Sync {
    /// Full token vocabulary, when the scorer knows it up front.
    fn vocabulary(&self) -> Option<&[Token]>;

    fn end_token(&self) -> &str;

    fn word_boundary(&self) -> WordBoundary {
        WordBoundary::WholeWords
    }

    /// Whether `score_next` may be called from several threads at once.
    fn is_concurrent(&self) -> bool {
        true
    }

    fn score_next(&self, source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError>;
}

impl<S: TokenScorer + ?Sized> TokenScorer for Box<S> {
    fn vocabulary(&self) -> Option<&[Token]> {
        (**self).vocabulary()
    }
    fn end_token(&self) -> &str {
        (**self).end_token()
    }
    fn word_boundary(&self) -> WordBoundary {
        (**self).word_boundary()
    }
    fn is_concurrent(&self) -> bool {
        (**self).is_concurrent()
    }
    fn score_next(&self, source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError> {
        (**self).score_next(source, prefix)
    }
}

impl<S: TokenScorer + ?Sized> TokenScorer for Arc<S> {
    fn vocabulary(&self) -> Option<&[Token]> {
        (**self).vocabulary()
    }
    fn end_token(&self) -> &str {
        (**self).end_token()
    }
    fn word_boundary(&self) -> WordBoundary {
        (**self).word_boundary()
    }
    fn is_concurrent(&self) -> bool {
        (**self).is_concurrent()
    }
    fn score_next(&self, source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError> {
        (**self).score_next(source, prefix)
    }
}

/// Converts string tokens into [`Token`]s.
pub fn tokens<I, S>(items: I) -> Vec<Token>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    items.into_iter().map(|s| Token::from(s.as_ref())).collect()
}
