//! Medical vocabulary: loading, term matching against a source document,
//! synonym expansion and banned-set construction.
//!
//! The permitted set for a document is every vocabulary term occurring in it,
//! widened by synonym groups. Everything else in the vocabulary is banned.

mod trie;

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::{normalize_word, normalize_words};

pub use trie::{NodeId, PhraseTrie};

#[derive(Debug, Error)]
pub enum VocabError {
    #[error("malformed vocabulary record on line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("vocabulary i/o failure: {0}")]
    Io(#[from] io::Error),
}

/// A non-empty sequence of normalized words.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Term(Vec<String>);

impl Term {
    /// Normalizes free text into a term. `None` if no word survives normalization.
    pub fn parse(raw: &str) -> Option<Self> {
        let words = normalize_words(raw);
        (!words.is_empty()).then_some(Self(words))
    }

    /// Builds a term from words that must already be normalized.
    pub fn from_words<I, S>(words: I) -> Option<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let words: Vec<String> = words.into_iter().map(Into::into).collect();
        let ok = !words.is_empty()
            && words
                .iter()
                .all(|w| normalize_word(w).as_deref() == Some(w.as_str()));
        ok.then_some(Self(words))
    }

    pub fn words(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join(" "))
    }
}

/// The term dictionary with disjoint synonym groups.
#[derive(Debug, Clone, Default)]
pub struct MedicalVocabulary {
    terms: BTreeSet<Term>,
    groups: Vec<BTreeSet<Term>>,
    group_of: HashMap<Term, usize>,
    index: PhraseTrie<Term>,
}

impl MedicalVocabulary {
    /// Builds a vocabulary. Every group member becomes a term; groups sharing
    /// a member are merged so that groups stay disjoint; singleton and
    /// duplicate groups disappear.
    pub fn new<T, G>(terms: T, groups: G) -> Self
    where
        T: IntoIterator<Item = Term>,
        G: IntoIterator<Item = Vec<Term>>,
    {
        let mut all: BTreeSet<Term> = terms.into_iter().collect();
        let mut merged: Vec<BTreeSet<Term>> = Vec::new();
        for group in groups {
            let mut group: BTreeSet<Term> = group.into_iter().collect();
            all.extend(group.iter().cloned());
            let (overlapping, rest): (Vec<_>, Vec<_>) = merged
                .into_iter()
                .partition(|existing| !existing.is_disjoint(&group));
            for existing in overlapping {
                group.extend(existing);
            }
            merged = rest;
            merged.push(group);
        }
        merged.retain(|g| g.len() > 1);
        merged.sort();

        let mut group_of = HashMap::new();
        for (idx, group) in merged.iter().enumerate() {
            for term in group {
                group_of.insert(term.clone(), idx);
            }
        }
        let mut index = PhraseTrie::new();
        for term in &all {
            index.insert(term.words(), term.clone());
        }
        Self {
            terms: all,
            groups: merged,
            group_of,
            index,
        }
    }

    pub fn terms(&self) -> &BTreeSet<Term> {
        &self.terms
    }

    pub fn synonym_groups(&self) -> &[BTreeSet<Term>] {
        &self.groups
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// The synonym group containing `term`, if any.
    pub fn synonyms_of(&self, term: &Term) -> Option<&BTreeSet<Term>> {
        self.group_of.get(term).map(|&idx| &self.groups[idx])
    }

    /// Reads the JSON-lines vocabulary format.
    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self, VocabError> {
        let mut terms = Vec::new();
        let mut groups = Vec::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let malformed = |reason: String| VocabError::Malformed {
                line: line_no,
                reason,
            };
            let record: VocabRecord =
                serde_json::from_str(&line).map_err(|e| malformed(e.to_string()))?;
            match record {
                VocabRecord::Term { term } => {
                    let parsed = Term::parse(&term)
                        .ok_or_else(|| malformed(format!("empty term {term:?}")))?;
                    terms.push(parsed);
                }
                VocabRecord::Synonyms { synonyms } => {
                    if synonyms.is_empty() {
                        return Err(malformed("empty synonym group".into()));
                    }
                    let group = synonyms
                        .iter()
                        .map(|raw| {
                            Term::parse(raw)
                                .ok_or_else(|| malformed(format!("empty term {raw:?}")))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    groups.push(group);
                }
            }
        }
        Ok(Self::new(terms, groups))
    }

    /// Writes the normalized JSON-lines form: ungrouped terms first, then groups,
    /// both in sorted order.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> io::Result<()> {
        for term in self.terms.iter().filter(|t| !self.group_of.contains_key(*t)) {
            let record = VocabRecord::Term {
                term: term.to_string(),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        for group in &self.groups {
            let record = VocabRecord::Synonyms {
                synonyms: group.iter().map(Term::to_string).collect(),
            };
            serde_json::to_writer(&mut out, &record)?;
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
enum VocabRecord {
    Term { term: String },
    Synonyms { synonyms: Vec<String> },
}

pub fn load_vocabulary<P: AsRef<Path>>(path: P) -> Result<MedicalVocabulary, VocabError> {
    let file = File::open(path)?;
    MedicalVocabulary::from_reader(BufReader::new(file))
}

/// Vocabulary terms allowed in generated text for one source document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PermittedTerms {
    terms: BTreeSet<Term>,
}

impl PermittedTerms {
    pub fn terms(&self) -> &BTreeSet<Term> {
        &self.terms
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.terms.contains(term)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl FromIterator<Term> for PermittedTerms {
    fn from_iter<I: IntoIterator<Item = Term>>(iter: I) -> Self {
        Self {
            terms: iter.into_iter().collect(),
        }
    }
}

/// Every vocabulary term occurring in `doc` as a contiguous run of normalized words.
pub fn match_terms(doc: &str, vocab: &MedicalVocabulary) -> PermittedTerms {
    let words = normalize_words(doc);
    let mut terms = BTreeSet::new();
    vocab.index.for_each_match(&words, |_, _, term| {
        terms.insert(term.clone());
    });
    PermittedTerms { terms }
}

/// Adds every member of each synonym group touched by `permitted` (one hop).
pub fn expand_synonyms(permitted: &PermittedTerms, vocab: &MedicalVocabulary) -> PermittedTerms {
    let mut terms = permitted.terms.clone();
    for term in &permitted.terms {
        if let Some(group) = vocab.synonyms_of(term) {
            terms.extend(group.iter().cloned());
        }
    }
    PermittedTerms { terms }
}

/// Convenience for the usual match, expand, ban sequence on one source text.
pub fn banned_set_for_source(source: &str, vocab: &MedicalVocabulary) -> BannedSet {
    let permitted = expand_synonyms(&match_terms(source, vocab), vocab);
    build_banned_set(vocab, &permitted)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TermKind {
    Banned(usize),
    Permitted,
}

/// Vocabulary terms forbidden in generated text, indexed for streaming match.
///
/// The trie also holds the permitted terms: when a completed word ends both a
/// banned term and a longer permitted term, the longer permitted match wins.
#[derive(Debug, Clone, Default)]
pub struct BannedSet {
    terms: Vec<Term>,
    trie: PhraseTrie<TermKind>,
}

/// Streaming match position: trie nodes reached by suffixes of the completed words.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchState {
    active: Vec<NodeId>,
}

/// A banned term found in text, ending at word index `end` (exclusive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub term: Term,
    pub end: usize,
}

pub fn build_banned_set(vocab: &MedicalVocabulary, permitted: &PermittedTerms) -> BannedSet {
    let terms: Vec<Term> = vocab.terms.difference(&permitted.terms).cloned().collect();
    let mut trie = PhraseTrie::new();
    for term in permitted.terms.iter().filter(|t| vocab.contains(t)) {
        trie.insert(term.words(), TermKind::Permitted);
    }
    for (idx, term) in terms.iter().enumerate() {
        trie.insert(term.words(), TermKind::Banned(idx));
    }
    BannedSet { terms, trie }
}

impl BannedSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Banned terms in sorted order.
    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn contains(&self, term: &Term) -> bool {
        self.terms.binary_search(term).is_ok()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Feeds one completed, normalized word. Returns the new state and the banned
    /// term this word completes, if the longest term ending here is banned.
    pub fn advance(&self, state: &MatchState, word: &str) -> (MatchState, Option<&Term>) {
        if self.terms.is_empty() {
            return (MatchState::default(), None);
        }
        let mut next = Vec::with_capacity(state.active.len() + 1);
        let mut longest: Option<(usize, TermKind)> = None;
        let starts = std::iter::once(PhraseTrie::<TermKind>::ROOT).chain(state.active.iter().copied());
        for from in starts {
            let Some(node) = self.trie.step(from, word) else {
                continue;
            };
            if let Some(&kind) = self.trie.terminal(node) {
                let depth = self.trie.depth(node);
                if longest.map_or(true, |(d, _)| depth > d) {
                    longest = Some((depth, kind));
                }
            }
            if self.trie.has_children(node) {
                next.push(node);
            }
        }
        let hit = match longest {
            Some((_, TermKind::Banned(idx))) => Some(&self.terms[idx]),
            _ => None,
        };
        (MatchState { active: next }, hit)
    }

    /// Every banned occurrence in `text` under the longest-match rule.
    pub fn violations(&self, text: &str) -> Vec<Violation> {
        let mut state = MatchState::default();
        let mut found = Vec::new();
        for (idx, word) in normalize_words(text).iter().enumerate() {
            let (next, hit) = self.advance(&state, word);
            if let Some(term) = hit {
                found.push(Violation {
                    term: term.clone(),
                    end: idx + 1,
                });
            }
            state = next;
        }
        found
    }
}
