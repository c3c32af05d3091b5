//! Evaluation: ROUGE recall, word-count statistics, binary classification
//! reports and consistency ICC.

mod classification;
mod icc;
mod report;
mod rouge;
mod stats;

use thiserror::Error;

pub use classification::{classification_report, ClassificationMetrics};
pub use icc::{icc_consistency, IccResult};
pub use report::{ClassificationEntry, EvaluationReport, TaskReport};
pub use rouge::{lcs_len, mean_rouge, rouge_l_recall, rouge_n_recall, rouge_scores, RougeScores};
pub use stats::{word_count_stats, WordCountStats};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("n-gram order must be at least 1")]
    InvalidOrder,
    #[error("reference has {got} words, fewer than n = {needed}")]
    ReferenceTooShort { needed: usize, got: usize },
    #[error("reference is empty")]
    EmptyReference,
    #[error("{predictions} predictions but {golds} gold labels")]
    LengthMismatch { predictions: usize, golds: usize },
    #[error("no input")]
    EmptyInput,
    #[error("need at least 2 subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("need at least 2 raters, got {0}")]
    TooFewRaters(usize),
    #[error("row {row} has {got} ratings, expected {expected}")]
    RaggedRatings { row: usize, expected: usize, got: usize },
    #[error("ratings must be finite")]
    NonFiniteRating,
    #[error("subjects do not vary (between-subject mean square is zero)")]
    DegenerateRatings,
}
