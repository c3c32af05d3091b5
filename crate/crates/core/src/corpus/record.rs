use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, Duration, FixedOffset};
use serde::{Deserialize, Serialize};

use super::CorpusError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteType {
    Admission,
    EdProvider,
    Progress,
    Consult,
    Operative,
    Pathology,
    Radiology,
}

impl NoteType {
    /// Notes that feed the HPI stream rather than the daily narrative.
    pub fn is_hpi_source(self) -> bool {
        matches!(self, Self::Admission | Self::EdProvider)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClinicalNote {
    #[serde(rename = "type")]
    pub note_type: NoteType,
    pub timestamp: DateTime<FixedOffset>,
    pub text: String,
}

/// One hospitalization with its notes and the reference discharge summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissionRecord {
    pub admission_id: String,
    pub admit_date: DateTime<FixedOffset>,
    pub discharge_date: DateTime<FixedOffset>,
    pub notes: Vec<ClinicalNote>,
    pub discharge_summary_text: String,
}

impl AdmissionRecord {
    /// Checks the ordering of admit and discharge, the presence of an
    /// admission note and a discharge summary, and that every note falls
    /// within a day of the stay.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let invalid = |reason: String| CorpusError::InvalidRecord {
            admission_id: self.admission_id.clone(),
            reason,
        };
        if self.admission_id.trim().is_empty() {
            return Err(invalid("empty admission_id".into()));
        }
        if self.admit_date > self.discharge_date {
            return Err(invalid(format!(
                "admit_date {} is after discharge_date {}",
                self.admit_date, self.discharge_date
            )));
        }
        if !self.notes.iter().any(|n| n.note_type == NoteType::Admission) {
            return Err(invalid("no admission note".into()));
        }
        if self.discharge_summary_text.trim().is_empty() {
            return Err(invalid("empty discharge summary".into()));
        }
        let earliest = self.admit_date - Duration::days(1);
        let latest = self.discharge_date + Duration::days(1);
        for note in &self.notes {
            if note.timestamp < earliest || note.timestamp > latest {
                return Err(invalid(format!(
                    "{:?} note at {} falls outside the stay",
                    note.note_type, note.timestamp
                )));
            }
        }
        Ok(())
    }
}

/// Reads one admission record per line, validating each.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<Vec<AdmissionRecord>, CorpusError> {
    let mut records = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: AdmissionRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: idx + 1,
                reason: e.to_string(),
            })?;
        record.validate()?;
        records.push(record);
    }
    Ok(records)
}

pub fn load_corpus<P: AsRef<Path>>(path: P) -> Result<Vec<AdmissionRecord>, CorpusError> {
    read_corpus(BufReader::new(File::open(path)?))
}
