use std::collections::{BTreeSet, HashMap};

use super::{LogProbDistribution, ScorerError, Token, TokenScorer, END_TOKEN};

const BOS: u32 = u32::MAX;

#[derive(Debug, Clone, Default)]
struct ContextCounts {
    next: HashMap<u32, u64>,
    total: u64,
}

/// Add-alpha smoothed word n-gram model. Ignores the source text when scoring.
#[derive(Debug, Clone)]
pub struct NgramScorer {
    order: usize,
    alpha: f64,
    vocab: Vec<Token>,
    index: HashMap<Token, u32>,
    counts: HashMap<Vec<u32>, ContextCounts>,
}

/// Trains on whitespace-split texts. Each text is padded with start markers and
/// closed with `<end>`; the vocabulary is every word type plus `<end>`.
pub fn train_ngram_scorer<S: AsRef<str>>(
    corpus: &[S],
    order: usize,
    alpha: f64,
) -> Result<NgramScorer, ScorerError> {
    if corpus.is_empty() {
        return Err(ScorerError::EmptyCorpus);
    }
    if order == 0 {
        return Err(ScorerError::InvalidOrder(order));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(ScorerError::InvalidSmoothing(alpha));
    }

    let mut types: BTreeSet<&str> = corpus
        .iter()
        .flat_map(|text| text.as_ref().split_whitespace())
        .collect();
    types.insert(END_TOKEN);
    let vocab: Vec<Token> = types.into_iter().map(Token::from).collect();
    let index: HashMap<Token, u32> = vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect();
    let end = index[END_TOKEN];

    let mut counts: HashMap<Vec<u32>, ContextCounts> = HashMap::new();
    for text in corpus {
        let mut seq = vec![BOS; order - 1];
        seq.extend(text.as_ref().split_whitespace().map(|w| index[w]));
        seq.push(end);
        for window in seq.windows(order) {
            let (context, next) = window.split_at(order - 1);
            let entry = counts.entry(context.to_vec()).or_default();
            *entry.next.entry(next[0]).or_default() += 1;
            entry.total += 1;
        }
    }

    Ok(NgramScorer {
        order,
        alpha,
        vocab,
        index,
        counts,
    })
}

impl NgramScorer {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    fn context(&self, prefix: &[Token]) -> Result<Vec<u32>, ScorerError> {
        let width = self.order - 1;
        let mut ctx = vec![BOS; width.saturating_sub(prefix.len())];
        let tail = &prefix[prefix.len().saturating_sub(width)..];
        for tok in tail {
            let id = self
                .index
                .get(tok)
                .ok_or_else(|| ScorerError::UnknownToken(tok.to_string()))?;
            ctx.push(*id);
        }
        Ok(ctx)
    }
}

impl TokenScorer for NgramScorer {
    fn vocabulary(&self) -> Option<&[Token]> {
        Some(&self.vocab)
    }

    fn end_token(&self) -> &str {
        END_TOKEN
    }

    fn score_next(&self, _source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError> {
        // the whole prefix must be in-vocabulary, not just the context window
        if let Some(bad) = prefix.iter().find(|t| !self.index.contains_key(*t)) {
            return Err(ScorerError::UnknownToken(bad.to_string()));
        }
        let context = self.context(prefix)?;
        let empty = ContextCounts::default();
        let counts = self.counts.get(&context).unwrap_or(&empty);
        let denom = (counts.total as f64 + self.alpha * self.vocab.len() as f64).ln();
        let entries = self
            .vocab
            .iter()
            .enumerate()
            .map(|(id, tok)| {
                let c = counts.next.get(&(id as u32)).copied().unwrap_or(0) as f64;
                (tok.clone(), (c + self.alpha).ln() - denom)
            })
            .collect();
        Ok(LogProbDistribution { entries })
    }
}
