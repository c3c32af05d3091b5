//! Beam search, with and without a banned-term constraint.
//!
//! The constrained variant checks each word as it is completed. A candidate
//! expansion that completes a banned term gets log score −∞ and is dropped,
//! so the next best alternative takes its beam slot; the parent's other
//! continuations stay alive.

use std::cmp::Ordering;

use rayon::prelude::*;
use thiserror::Error;

use crate::scorer::{LogProbDistribution, ScorerError, Token, TokenScorer, WordBoundary};
use crate::text::normalize_word;
use crate::vocab::{BannedSet, MatchState};

#[derive(Debug, Error)]
pub enum DecodeError {
    #[error("invalid beam configuration: {0}")]
    InvalidConfig(String),
    #[error("scorer offered no tokens")]
    EmptyVocabulary,
    #[error("every candidate completed a banned term by step {step}")]
    AllBeamsPruned { step: usize },
    #[error(transparent)]
    Scorer(#[from] ScorerError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct BeamConfig {
    pub beam_width: usize,
    /// Maximum tokens per hypothesis, the end token included.
    pub max_len: usize,
    /// Exponent for `score / len^p` ranking; 0 ranks by the raw summed log score.
    pub length_penalty: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        Self {
            beam_width: 4,
            max_len: 64,
            length_penalty: 0.0,
        }
    }
}

impl BeamConfig {
    pub fn new(beam_width: usize, max_len: usize) -> Result<Self, DecodeError> {
        let config = Self {
            beam_width,
            max_len,
            length_penalty: 0.0,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.beam_width == 0 {
            return Err(DecodeError::InvalidConfig("beam width must be at least 1".into()));
        }
        if self.max_len == 0 {
            return Err(DecodeError::InvalidConfig("max_len must be at least 1".into()));
        }
        if !self.length_penalty.is_finite() {
            return Err(DecodeError::InvalidConfig("length penalty must be finite".into()));
        }
        Ok(())
    }

    fn adjusted(&self, score: f64, len: usize) -> f64 {
        if self.length_penalty == 0.0 || len == 0 {
            score
        } else {
            score / (len as f64).powf(self.length_penalty)
        }
    }
}

/// Word-completion tracker carried by each hypothesis.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordState {
    matcher: MatchState,
    pending: String,
}

impl WordState {
    fn complete(&mut self, banned: &BannedSet) -> bool {
        if self.pending.is_empty() {
            return true;
        }
        let word = normalize_word(&self.pending);
        self.pending.clear();
        match word {
            Some(word) => {
                let (next, hit) = banned.advance(&self.matcher, &word);
                self.matcher = next;
                hit.is_none()
            }
            None => true,
        }
    }

    fn push_text(&mut self, banned: &BannedSet, text: &str) -> bool {
        for ch in text.chars() {
            if ch.is_whitespace() {
                if !self.complete(banned) {
                    return false;
                }
            } else {
                self.pending.push(ch);
            }
        }
        true
    }

    /// Feeds one token. `None` means the token completed a banned term.
    fn feed(&self, banned: &BannedSet, boundary: WordBoundary, token: &str, is_end: bool) -> Option<Self> {
        let mut next = self.clone();
        let ok = if is_end {
            next.complete(banned)
        } else {
            match boundary {
                WordBoundary::WholeWords => {
                    next.complete(banned) && next.push_text(banned, token) && next.complete(banned)
                }
                WordBoundary::LeadingMarker => match WordBoundary::strip_marker(token) {
                    Some(rest) => next.complete(banned) && next.push_text(banned, rest),
                    None => next.push_text(banned, token),
                },
            }
        };
        ok.then_some(next)
    }
}

/// A partial or finished decode.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub tokens: Vec<Token>,
    /// Sum of the per-step natural-log probabilities of `tokens`.
    pub score: f64,
    /// The last token is the end token.
    pub finished: bool,
    state: WordState,
}

impl Hypothesis {
    fn root() -> Self {
        Self {
            tokens: Vec::new(),
            score: 0.0,
            finished: false,
            state: WordState::default(),
        }
    }

    /// Generated text, without the end token.
    pub fn text(&self, boundary: WordBoundary) -> String {
        let body = if self.finished {
            &self.tokens[..self.tokens.len() - 1]
        } else {
            &self.tokens[..]
        };
        detokenize(body, boundary)
    }
}

/// Joins tokens into text under the given word-boundary convention.
pub fn detokenize(tokens: &[Token], boundary: WordBoundary) -> String {
    match boundary {
        WordBoundary::WholeWords => tokens.iter().map(|t| &**t).collect::<Vec<_>>().join(" "),
        WordBoundary::LeadingMarker => {
            let mut out = String::new();
            for tok in tokens {
                match WordBoundary::strip_marker(tok) {
                    Some(rest) => {
                        out.push(' ');
                        out.push_str(rest);
                    }
                    None => out.push_str(tok),
                }
            }
            out.trim().to_owned()
        }
    }
}

/// Orders hypotheses best first: higher adjusted score, then the
/// lexicographically earlier token sequence.
fn rank(config: &BeamConfig, a: &Hypothesis, b: &Hypothesis) -> Ordering {
    let sa = config.adjusted(a.score, a.tokens.len());
    let sb = config.adjusted(b.score, b.tokens.len());
    sb.total_cmp(&sa).then_with(|| a.tokens.cmp(&b.tokens))
}

pub fn beam_search<S>(scorer: &S, source: &str, config: &BeamConfig) -> Result<Hypothesis, DecodeError>
where
    S: TokenScorer + ?Sized,
{
    search(scorer, source, &BannedSet::empty(), config)
}

pub fn constrained_beam_search<S>(
    scorer: &S,
    source: &str,
    banned: &BannedSet,
    config: &BeamConfig,
) -> Result<Hypothesis, DecodeError>
where
    S: TokenScorer + ?Sized,
{
    search(scorer, source, banned, config)
}

fn score_all<S>(scorer: &S, source: &str, live: &[Hypothesis]) -> Result<Vec<LogProbDistribution>, ScorerError>
where
    S: TokenScorer + ?Sized,
{
    if scorer.is_concurrent() && live.len() > 1 {
        live.par_iter().map(|h| scorer.score_next(source, &h.tokens)).collect()
    } else {
        live.iter().map(|h| scorer.score_next(source, &h.tokens)).collect()
    }
}

fn search<S>(scorer: &S, source: &str, banned: &BannedSet, config: &BeamConfig) -> Result<Hypothesis, DecodeError>
where
    S: TokenScorer + ?Sized,
{
    config.validate()?;
    if scorer.vocabulary().is_some_and(|v| v.is_empty()) {
        return Err(DecodeError::EmptyVocabulary);
    }
    let end = scorer.end_token();
    let boundary = scorer.word_boundary();

    let mut live = vec![Hypothesis::root()];
    let mut pool: Vec<Hypothesis> = Vec::new();
    let mut pruned_at = None;

    for step in 0..config.max_len {
        let dists = score_all(scorer, source, &live)?;
        let mut candidates = Vec::new();
        for (parent, dist) in live.iter().zip(&dists) {
            if dist.is_empty() {
                return Err(DecodeError::EmptyVocabulary);
            }
            for (tok, lp) in dist.entries() {
                if *lp == f64::NEG_INFINITY {
                    continue;
                }
                let is_end = &**tok == end;
                let Some(state) = parent.state.feed(banned, boundary, tok, is_end) else {
                    pruned_at = Some(step);
                    continue;
                };
                let mut tokens = Vec::with_capacity(parent.tokens.len() + 1);
                tokens.extend_from_slice(&parent.tokens);
                tokens.push(tok.clone());
                candidates.push(Hypothesis {
                    tokens,
                    score: parent.score + lp,
                    finished: is_end,
                    state,
                });
            }
        }
        if candidates.is_empty() {
            live.clear();
            break;
        }
        candidates.sort_by(|a, b| rank(config, a, b));
        candidates.truncate(config.beam_width);

        let (done, rest): (Vec<_>, Vec<_>) = candidates.into_iter().partition(|h| h.finished);
        pool.extend(done);
        live = rest;
        if live.is_empty() {
            break;
        }
        // With no length penalty scores only fall, so a strictly better finished
        // hypothesis can never be overtaken.
        if config.length_penalty == 0.0 {
            let best_done = pool.iter().map(|h| h.score).fold(f64::NEG_INFINITY, f64::max);
            let best_live = live.iter().map(|h| h.score).fold(f64::NEG_INFINITY, f64::max);
            if best_done > best_live {
                live.clear();
                break;
            }
        }
    }

    // Hypotheses cut off at max_len still owe a check on their trailing word.
    for mut h in live {
        if h.state.complete(banned) {
            pool.push(h);
        } else {
            pruned_at = Some(config.max_len);
        }
    }

    pool.into_iter()
        .min_by(|a, b| rank(config, a, b))
        .ok_or(match pruned_at {
            Some(step) => DecodeError::AllBeamsPruned { step },
            None => DecodeError::EmptyVocabulary,
        })
}
