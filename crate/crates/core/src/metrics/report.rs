use serde::{Deserialize, Serialize};

use super::{ClassificationMetrics, IccResult, RougeScores, WordCountStats};

/// ROUGE and length statistics for one generation task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaskReport {
    pub task: String,
    pub pairs: usize,
    pub rouge: RougeScores,
    pub candidate_words: WordCountStats,
    pub reference_words: WordCountStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationEntry {
    pub task: String,
    #[serde(flatten)]
    pub metrics: ClassificationMetrics,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub summaries: Vec<TaskReport>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub classification: Vec<ClassificationEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub icc: Option<IccResult>,
}
