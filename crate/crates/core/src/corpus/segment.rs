use std::collections::BTreeMap;

use chrono::{DateTime, Duration, FixedOffset, NaiveDate};
use serde::Serialize;

use super::record::{AdmissionRecord, ClinicalNote, NoteType};
use super::sentences::split_sentences;

pub const FOLLOWUP_WINDOW_HOURS: i64 = 72;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FollowupCandidate {
    pub sentence: String,
    pub timestamp: DateTime<FixedOffset>,
    pub note_type: NoteType,
}

/// The three input streams of one admission.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SegmentedRecord {
    pub hpi_inputs: Vec<ClinicalNote>,
    pub daily_inputs: BTreeMap<NaiveDate, Vec<ClinicalNote>>,
    pub followup_candidates: Vec<FollowupCandidate>,
}

/// Routes admission and ED notes to the HPI stream and every other note to
/// the calendar day (in the admission's UTC offset) it was written on. Notes
/// written in the 72 hours up to discharge, inclusive at both ends, also
/// contribute their sentences as follow-up candidates.
pub fn segment_record(record: &AdmissionRecord) -> SegmentedRecord {
    let offset = *record.admit_date.offset();
    let window_start = record.discharge_date - Duration::hours(FOLLOWUP_WINDOW_HOURS);

    let mut notes: Vec<&ClinicalNote> = record.notes.iter().collect();
    notes.sort_by_key(|n| n.timestamp);

    let mut out = SegmentedRecord::default();
    for note in notes {
        if note.note_type.is_hpi_source() {
            out.hpi_inputs.push(note.clone());
        } else {
            let day = note.timestamp.with_timezone(&offset).date_naive();
            out.daily_inputs.entry(day).or_default().push(note.clone());
        }
        if note.timestamp >= window_start && note.timestamp <= record.discharge_date {
            out.followup_candidates
                .extend(split_sentences(&note.text).into_iter().map(|s| FollowupCandidate {
                    sentence: s.to_string(),
                    timestamp: note.timestamp,
                    note_type: note.note_type,
                }));
        }
    }
    out
}
