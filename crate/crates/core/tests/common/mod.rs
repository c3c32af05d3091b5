//! Helpers shared by the integration suites: a seeded random scorer and
//! oracles written without reference to the library's own implementations.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::BTreeSet;
use std::hash::{Hash, Hasher};

use hospcourse::scorer::{LogProbDistribution, ScorerError, Token, TokenScorer, WordBoundary};
use hospcourse::vocab::{build_banned_set, BannedSet, MedicalVocabulary, PermittedTerms, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const END: &str = "<end>";
pub const MARKER: char = 'Ġ';

/// Next-token distributions drawn afresh for every prefix from a seeded
/// stream, so any prefix always scores the same.
pub struct RandomScorer {
    pub vocab: Vec<Token>,
    pub boundary: WordBoundary,
    pub seed: u64,
    pub spread: f64,
}

impl RandomScorer {
    pub fn new(words: &[String], boundary: WordBoundary, seed: u64, spread: f64) -> Self {
        let mut vocab: Vec<Token> = words.iter().map(|w| Token::from(w.as_str())).collect();
        vocab.push(Token::from(END));
        Self { vocab, boundary, seed, spread }
    }

    pub fn lp(&self, prefix: &[Token]) -> Vec<(Token, f64)> {
        let mut h = DefaultHasher::new();
        self.seed.hash(&mut h);
        for t in prefix {
            t.as_ref().hash(&mut h);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(h.finish());
        let raw: Vec<f64> = self.vocab.iter().map(|_| rng.gen_range(-self.spread..self.spread)).collect();
        let max = raw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = raw.iter().map(|x| (x - max).exp()).sum::<f64>().ln() + max;
        self.vocab.iter().cloned().zip(raw.into_iter().map(|x| (x - z).min(0.0))).collect()
    }
}

impl TokenScorer for RandomScorer {
    fn vocabulary(&self) -> Option<&[Token]> {
        Some(&self.vocab)
    }
    fn end_token(&self) -> &str {
        END
    }
    fn word_boundary(&self) -> WordBoundary {
        self.boundary
    }
    fn score_next(&self, _source: &str, prefix: &[Token]) -> Result<LogProbDistribution, ScorerError> {
        LogProbDistribution::new(self.lp(prefix))
    }
}

/// A scored complete decode: ended with the end token or cut at max_len.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub tokens: Vec<Token>,
    pub score: f64,
}

/// Every sequence the decoder could return, in no particular order.
pub fn enumerate(scorer: &RandomScorer, max_len: usize) -> Vec<Sequence> {
    let mut out = Vec::new();
    let mut stack = vec![(Vec::<Token>::new(), 0.0f64)];
    while let Some((prefix, score)) = stack.pop() {
        for (tok, lp) in scorer.lp(&prefix) {
            let mut seq = prefix.clone();
            seq.push(tok.clone());
            let s = score + lp;
            if &*tok == END || seq.len() == max_len {
                out.push(Sequence { tokens: seq, score: s });
            } else {
                stack.push((seq, s));
            }
        }
    }
    out
}

/// Higher score first, then the lexicographically smaller token sequence.
pub fn better(a: &Sequence, b: &Sequence) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| {
        let x: Vec<&str> = a.tokens.iter().map(|t| &**t).collect();
        let y: Vec<&str> = b.tokens.iter().map(|t| &**t).collect();
        x.cmp(&y)
    })
}

pub fn argmax(seqs: impl IntoIterator<Item = Sequence>) -> Option<Sequence> {
    seqs.into_iter().min_by(better)
}

/// Words of a token sequence, end token dropped.
pub fn words_of(tokens: &[Token], boundary: WordBoundary) -> Vec<String> {
    let body = tokens.iter().filter(|t| &***t != END);
    let mut words: Vec<String> = Vec::new();
    match boundary {
        WordBoundary::WholeWords => words.extend(body.map(|t| t.to_string())),
        WordBoundary::LeadingMarker => {
            for t in body {
                match t.strip_prefix(MARKER) {
                    Some(rest) => words.push(rest.to_string()),
                    None => match words.last_mut() {
                        Some(w) => w.push_str(t),
                        None => words.push(t.to_string()),
                    },
                }
            }
        }
    }
    words
        .into_iter()
        .map(|w| w.to_lowercase().trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Text words of `text`, normalized the same way as term entries.
pub fn text_words(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| w.to_lowercase().trim_matches(|c: char| !c.is_alphanumeric()).to_string())
        .filter(|w| !w.is_empty())
        .collect()
}

/// Banned occurrences under the longest-match rule: at each word position
/// the longest listed phrase ending there decides, and it is a violation
/// iff that phrase is banned.
pub fn banned_hits(words: &[String], banned: &[Vec<String>], permitted: &[Vec<String>]) -> usize {
    let mut hits = 0;
    for end in 1..=words.len() {
        let mut best: Option<(usize, bool)> = None;
        for (list, is_banned) in [(banned, true), (permitted, false)] {
            for phrase in list {
                let n = phrase.len();
                if n <= end && words[end - n..end] == phrase[..] && best.map_or(true, |(m, _)| n > m) {
                    best = Some((n, is_banned));
                }
            }
        }
        if let Some((_, true)) = best {
            hits += 1;
        }
    }
    hits
}

/// A random split of random phrases over `words` into banned and permitted.
pub struct RandomConstraint {
    pub banned_phrases: Vec<Vec<String>>,
    pub permitted_phrases: Vec<Vec<String>>,
    pub banned: BannedSet,
}

pub fn random_constraint(rng: &mut impl Rng, words: &[String], max_terms: usize) -> RandomConstraint {
    let mut phrases: BTreeSet<Vec<String>> = BTreeSet::new();
    let count = rng.gen_range(1..=max_terms);
    for _ in 0..count {
        let len = rng.gen_range(1..=3);
        phrases.insert((0..len).map(|_| words[rng.gen_range(0..words.len())].clone()).collect());
    }
    let mut banned_phrases = Vec::new();
    let mut permitted_phrases = Vec::new();
    for p in phrases {
        if rng.gen_bool(0.6) {
            banned_phrases.push(p);
        } else {
            permitted_phrases.push(p);
        }
    }
    let to_term = |p: &Vec<String>| Term::from_words(p.iter().cloned()).expect("non-empty phrase");
    let vocab = MedicalVocabulary::new(
        banned_phrases.iter().chain(&permitted_phrases).map(to_term),
        Vec::<Vec<Term>>::new(),
    );
    let permitted: PermittedTerms = permitted_phrases.iter().map(to_term).collect();
    let banned = build_banned_set(&vocab, &permitted);
    RandomConstraint { banned_phrases, permitted_phrases, banned }
}

/// Token inventory for a trial with `n` non-end tokens, plus the words those
/// tokens can form. In marker mode the first token starts a word and the
/// rest start one with probability one half.
pub fn random_tokens(rng: &mut impl Rng, boundary: WordBoundary, n: usize) -> (Vec<String>, Vec<String>) {
    const POOL: &[&str] = &["a", "b", "c", "d", "e", "f", "g", "h"];
    let letters: Vec<String> = POOL[..n].iter().map(|s| s.to_string()).collect();
    match boundary {
        WordBoundary::WholeWords => (letters.clone(), letters),
        WordBoundary::LeadingMarker => {
            let mut tokens = Vec::new();
            let mut stems = Vec::new();
            let mut tails = Vec::new();
            for (i, l) in letters.iter().enumerate() {
                if i == 0 || rng.gen_bool(0.5) {
                    tokens.push(format!("{MARKER}{l}"));
                    stems.push(l.clone());
                } else {
                    tokens.push(l.clone());
                    tails.push(l.clone());
                }
            }
            let mut words = stems.clone();
            for s in &stems {
                for t in &tails {
                    words.push(format!("{s}{t}"));
                }
            }
            (tokens, words)
        }
    }
}
