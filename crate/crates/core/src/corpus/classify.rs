use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::record::{ClinicalNote, NoteType};
use super::CorpusError;
use crate::scorer::TokenScorer;
use crate::text::normalize_words;

/// Binary include/exclude decision over arbitrary text.
pub trait InclusionClassifier: Send + Sync {
    fn decide(&self, text: &str) -> bool;
}

impl<F: Fn(&str) -> bool + Send + Sync> InclusionClassifier for F {
    fn decide(&self, text: &str) -> bool {
        self(text)
    }
}

const FOLLOWUP_CUES: &str = r"(?ix)
    \bfollow(?:[\s-]*up|ing[\s-]+up|ed[\s-]+up)?\s+(?:with|in|at)\b
  | \bfollow[\s-]?ups?\b
  | \bf/u\b
  | \boutpatient\b
  | \bappointments?\b
  | \bschedul(?:e|ed|ing)\b
  | \bclinic\b
  | \bpcp\b
  | \breturn\s+to\s+(?:the\s+)?(?:ed|clinic|office)\b
  | \bin\s+\d+\s*(?:-\s*\d+\s*)?(?:days?|weeks?|wks?|months?)\b
";

/// Flags sentences carrying a plan-of-care cue such as "follow up with",
/// "outpatient", "appointment" or "in 2 weeks".
#[derive(Debug, Clone)]
pub struct FollowupCueClassifier {
    cues: Regex,
}

impl Default for FollowupCueClassifier {
    fn default() -> Self {
        static CUES: OnceLock<Regex> = OnceLock::new();
        Self {
            cues: CUES
                .get_or_init(|| Regex::new(FOLLOWUP_CUES).expect("cue pattern compiles"))
                .clone(),
        }
    }
}

impl InclusionClassifier for FollowupCueClassifier {
    fn decide(&self, text: &str) -> bool {
        self.cues.is_match(text)
    }
}

pub const DEFAULT_SALIENCE_KEYWORDS: &[&str] = &[
    "acute", "admitted", "biopsy", "consulted", "craniotomy", "ct", "cta", "decline", "deteriorated",
    "discontinued", "embolization", "eeg", "extubated", "hemorrhage", "icu", "increased", "initiated",
    "intubated", "mri", "new", "procedure", "resection", "seizure", "started", "stroke", "surgery",
    "thrombectomy", "transferred", "transfusion", "worsening",
];

/// Calls a note salient when it is long enough and mentions at least one
/// event keyword.
#[derive(Debug, Clone)]
pub struct SalienceClassifier {
    keywords: Vec<Vec<String>>,
    min_words: usize,
}

impl SalienceClassifier {
    pub fn new<S: AsRef<str>>(keywords: &[S], min_words: usize) -> Self {
        Self {
            keywords: keywords
                .iter()
                .map(|k| keyword_words(k.as_ref()))
                .filter(|k| !k.is_empty())
                .collect(),
            min_words,
        }
    }
}

impl Default for SalienceClassifier {
    fn default() -> Self {
        Self::new(DEFAULT_SALIENCE_KEYWORDS, 8)
    }
}

impl InclusionClassifier for SalienceClassifier {
    fn decide(&self, text: &str) -> bool {
        let words = keyword_words(text);
        !words.is_empty()
            && words.len() >= self.min_words
            && self.keywords.iter().any(|k| contains_phrase(&words, k))
    }
}

/// Normalized words, further split at hyphens and slashes so "post-tPA"
/// exposes "tpa".
fn keyword_words(text: &str) -> Vec<String> {
    normalize_words(text)
        .iter()
        .flat_map(|w| w.split(['-', '/']).filter(|p| !p.is_empty()).map(String::from).collect::<Vec<_>>())
        .collect()
}

fn contains_phrase(words: &[String], phrase: &[String]) -> bool {
    !phrase.is_empty() && words.windows(phrase.len()).any(|w| w == phrase)
}

/// Uses a scorer as a classifier by comparing the log probabilities it gives
/// the tokens "1" and "0" as the first output for `text`. This lets neural
/// classifiers sit behind the external scorer protocol.
pub struct ScorerClassifier<S> {
    scorer: S,
}

impl<S: TokenScorer> ScorerClassifier<S> {
    pub fn new(scorer: S) -> Self {
        Self { scorer }
    }
}

impl<S: TokenScorer> InclusionClassifier for ScorerClassifier<S> {
    /// Scorer failures count as exclusion so the function stays total.
    fn decide(&self, text: &str) -> bool {
        match self.scorer.score_next(text, &[]) {
            Ok(dist) => dist.log_prob("1") > dist.log_prob("0"),
            Err(_) => false,
        }
    }
}

/// Forces inclusion of a note when any keyword occurs in its text or its
/// type is listed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverrideRule {
    pub name: String,
    #[serde(default)]
    pub keywords: Vec<String>,
    #[serde(default)]
    pub note_types: Vec<NoteType>,
}

impl OverrideRule {
    pub fn fires(&self, note: &ClinicalNote) -> bool {
        if self.note_types.contains(&note.note_type) {
            return true;
        }
        if self.keywords.is_empty() {
            return false;
        }
        let words = keyword_words(&note.text);
        self.keywords
            .iter()
            .any(|k| contains_phrase(&words, &keyword_words(k)))
    }
}

pub fn default_override_rules() -> Vec<OverrideRule> {
    vec![
        OverrideRule {
            name: "procedure-reports".into(),
            keywords: Vec::new(),
            note_types: vec![NoteType::Operative, NoteType::Pathology],
        },
        OverrideRule {
            name: "thrombolysis".into(),
            keywords: vec!["tPA".into(), "alteplase".into(), "tenecteplase".into()],
            note_types: Vec::new(),
        },
    ]
}

/// Reads override rules, one JSON object per line.
pub fn read_override_rules<R: BufRead>(reader: R) -> Result<Vec<OverrideRule>, CorpusError> {
    let mut rules = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rule: OverrideRule = serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        rules.push(rule);
    }
    Ok(rules)
}

pub fn load_override_rules<P: AsRef<Path>>(path: P) -> Result<Vec<OverrideRule>, CorpusError> {
    read_override_rules(BufReader::new(File::open(path)?))
}

pub fn classify_document<C>(note: &ClinicalNote, classifier: &C, overrides: &[OverrideRule]) -> bool
where
    C: InclusionClassifier + ?Sized,
{
    overrides.iter().any(|r| r.fires(note)) || classifier.decide(&note.text)
}

pub fn classify_followup<C>(sentence: &str, classifier: &C) -> bool
where
    C: InclusionClassifier + ?Sized,
{
    classifier.decide(sentence)
}
