use std::fmt;

use hospcourse::corpus::{CorpusError, SummarizeError};
use hospcourse::decode::DecodeError;
use hospcourse::metrics::MetricError;
use hospcourse::scorer::ScorerError;
use hospcourse::vocab::VocabError;

/// A failure reported as `<Class>: message` on one stderr line.
#[derive(Debug)]
pub struct CliError {
    pub class: &'static str,
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self { class: "ConfigError", code: 2, message: message.into() }
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self { class: "ParseError", code: 2, message: message.into() }
    }

    pub fn corpus(message: impl Into<String>) -> Self {
        Self { class: "CorpusError", code: 4, message: message.into() }
    }

    pub fn metric(message: impl Into<String>) -> Self {
        Self { class: "MetricError", code: 5, message: message.into() }
    }

    pub fn io(what: &str, err: std::io::Error) -> Self {
        Self { class: "IoError", code: 2, message: format!("{what}: {err}") }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // keep the report on a single line
        let flat: String = self
            .message
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect::<Vec<_>>()
            .join(" ");
        write!(f, "{}: {flat}", self.class)
    }
}

impl From<ScorerError> for CliError {
    fn from(e: ScorerError) -> Self {
        Self { class: "ScorerError", code: 3, message: e.to_string() }
    }
}

impl From<CorpusError> for CliError {
    fn from(e: CorpusError) -> Self {
        Self::corpus(e.to_string())
    }
}

impl From<VocabError> for CliError {
    fn from(e: VocabError) -> Self {
        Self::config(format!("vocabulary: {e}"))
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        Self::metric(e.to_string())
    }
}

impl From<SummarizeError> for CliError {
    fn from(e: SummarizeError) -> Self {
        let (class, code) = match &e.source {
            DecodeError::InvalidConfig(_) => ("ConfigError", 2),
            DecodeError::AllBeamsPruned { .. } => ("GenerationError", 3),
            DecodeError::EmptyVocabulary | DecodeError::Scorer(_) => ("ScorerError", 3),
        };
        Self { class, code, message: e.to_string() }
    }
}
