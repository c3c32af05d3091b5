//! Locates the hospital-course section of a discharge summary.
//!
//! A course header is a line starting with one of the configured phrases
//! (case-insensitive), followed either by a colon, with the section possibly
//! continuing on the same line, or by the end of the line. The section runs to
//! the next section header: a configured stop phrase in the same shape, or any
//! capitalized line ending in a colon.

use std::ops::Range;
use std::sync::OnceLock;

use regex::Regex;

use super::CorpusError;

pub const DEFAULT_COURSE_HEADERS: &[&str] = &[
    "brief hospital course",
    "summary of hospital course",
    "hospital course by problem",
    "hospital course by system",
    "hospital course by systems",
    "hospital course",
];

pub const DEFAULT_STOP_HEADERS: &[&str] = &[
    "discharge medications",
    "discharge medication",
    "medications on discharge",
    "medications on admission",
    "admission medications",
    "discharge diagnosis",
    "discharge diagnoses",
    "discharge condition",
    "condition at discharge",
    "discharge disposition",
    "disposition",
    "discharge instructions",
    "follow-up instructions",
    "followup instructions",
    "follow up",
    "pertinent results",
    "physical exam",
    "procedures",
    "major surgical or invasive procedure",
    "history of present illness",
    "past medical history",
    "allergies",
    "social history",
    "family history",
    "code status",
    "transitional issues",
];

#[derive(Debug, Clone)]
pub struct SectionLexicon {
    course: Regex,
    stop: Regex,
}

fn phrase_pattern(phrase: &str) -> String {
    phrase
        .split_whitespace()
        .map(regex::escape)
        .collect::<Vec<_>>()
        .join(r"[ \t]+")
}

fn alternation<S: AsRef<str>>(phrases: &[S]) -> String {
    let mut sorted: Vec<&str> = phrases.iter().map(AsRef::as_ref).collect();
    // longest first so "hospital course by problem" wins over "hospital course"
    sorted.sort_by_key(|p| std::cmp::Reverse(p.len()));
    sorted
        .into_iter()
        .map(phrase_pattern)
        .collect::<Vec<_>>()
        .join("|")
}

impl SectionLexicon {
    pub fn new<S: AsRef<str>>(course_headers: &[S], stop_headers: &[S]) -> Result<Self, CorpusError> {
        if course_headers.is_empty() {
            return Err(CorpusError::InvalidLexicon("no course headers".into()));
        }
        let course = format!(
            r"(?im)^[ \t]*(?:{})[ \t]*(?::[ \t]*|\r?$)",
            alternation(course_headers)
        );
        let generic = r"[A-Z][A-Za-z0-9 /&(),'-]{0,60}:[ \t]*\r?$";
        let stop = if stop_headers.is_empty() {
            format!(r"(?m)^[ \t]*{generic}")
        } else {
            format!(
                r"(?m)^[ \t]*(?:(?i:{})[ \t]*(?::|\r?$)|{generic})",
                alternation(stop_headers)
            )
        };
        let build = |p: &str| Regex::new(p).map_err(|e| CorpusError::InvalidLexicon(e.to_string()));
        Ok(Self {
            course: build(&course)?,
            stop: build(&stop)?,
        })
    }

    /// Byte range of the trimmed section body.
    pub fn find(&self, text: &str) -> Option<Range<usize>> {
        let header = self.course.find(text)?;
        let start = header.end();
        let end = self
            .stop
            .find_at(text, start)
            .map_or(text.len(), |m| m.start());
        let body = &text[start..end];
        let lead = body.len() - body.trim_start().len();
        let trimmed = body.trim();
        Some(start + lead..start + lead + trimmed.len())
    }

    pub fn extract<'a>(&self, text: &'a str) -> Result<&'a str, CorpusError> {
        self.find(text)
            .map(|r| &text[r])
            .ok_or(CorpusError::SectionNotFound)
    }
}

impl Default for SectionLexicon {
    fn default() -> Self {
        Self::new(DEFAULT_COURSE_HEADERS, DEFAULT_STOP_HEADERS).expect("default lexicon compiles")
    }
}

fn default_lexicon() -> &'static SectionLexicon {
    static LEXICON: OnceLock<SectionLexicon> = OnceLock::new();
    LEXICON.get_or_init(SectionLexicon::default)
}

/// Extracts the hospital-course section with the default header lexicon.
/// The result is always a substring of `discharge_summary`.
pub fn extract_hospital_course(discharge_summary: &str) -> Result<&str, CorpusError> {
    default_lexicon().extract(discharge_summary)
}
