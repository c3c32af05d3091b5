//! Admission records, section extraction, day-to-day segmentation,
//! inclusion classification and assembly of the generated hospital course.

mod classify;
mod extract;
mod pipeline;
mod record;
mod segment;
mod sentences;
mod split;

use thiserror::Error;

pub use classify::{
    classify_document, classify_followup, default_override_rules, load_override_rules,
    read_override_rules, FollowupCueClassifier, InclusionClassifier, OverrideRule,
    SalienceClassifier, ScorerClassifier,
};
pub use extract::{
    extract_hospital_course, SectionLexicon, DEFAULT_COURSE_HEADERS, DEFAULT_STOP_HEADERS,
};
pub use pipeline::{
    summarize_admission, Classifiers, DailyEntry, HospitalCourse, Segment, SummarizeError,
    SummarizerConfig,
};
pub use record::{load_corpus, read_corpus, AdmissionRecord, ClinicalNote, NoteType};
pub use segment::{segment_record, FollowupCandidate, SegmentedRecord, FOLLOWUP_WINDOW_HOURS};
pub use sentences::{sentence_spans, split_sentences};
pub use split::{split_corpus, SplitRatios};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("record {admission_id}: {reason}")]
    InvalidRecord { admission_id: String, reason: String },
    #[error("no hospital-course section found")]
    SectionNotFound,
    #[error("invalid section lexicon: {0}")]
    InvalidLexicon(String),
    #[error("invalid split ratios: {0}")]
    InvalidRatios(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
