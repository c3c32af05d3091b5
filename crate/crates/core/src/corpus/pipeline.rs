use std::collections::HashSet;
use std::fmt;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::classify::{
    classify_document, classify_followup, default_override_rules, FollowupCueClassifier,
    InclusionClassifier, OverrideRule, SalienceClassifier,
};
use super::record::{AdmissionRecord, ClinicalNote};
use super::segment::segment_record;
use crate::decode::{beam_search, constrained_beam_search, BeamConfig, DecodeError};
use crate::scorer::{TokenScorer, DEFAULT_SOURCE_BUDGET};
use crate::text::truncate_front;
use crate::vocab::{banned_set_for_source, MedicalVocabulary};

#[derive(Debug, Clone, PartialEq)]
pub struct SummarizerConfig {
    pub hpi: BeamConfig,
    /// Kept short so each day yields a sentence or two.
    pub daily: BeamConfig,
    /// Apply the banned-term constraint; off runs plain beam search.
    pub constrain: bool,
    /// Words of source text, counted from the end, passed to the scorer.
    pub source_budget: usize,
}

impl Default for SummarizerConfig {
    fn default() -> Self {
        Self {
            hpi: BeamConfig::default(),
            daily: BeamConfig { max_len: 40, ..BeamConfig::default() },
            constrain: true,
            source_budget: DEFAULT_SOURCE_BUDGET,
        }
    }
}

pub struct Classifiers {
    pub document: Box<dyn InclusionClassifier>,
    pub followup: Box<dyn InclusionClassifier>,
    pub overrides: Vec<OverrideRule>,
}

impl Default for Classifiers {
    fn default() -> Self {
        Self {
            document: Box::new(SalienceClassifier::default()),
            followup: Box::new(FollowupCueClassifier::default()),
            overrides: default_override_rules(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DailyEntry {
    pub day: NaiveDate,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HospitalCourse {
    pub hpi_summary: String,
    pub daily_entries: Vec<DailyEntry>,
    pub followups: Vec<String>,
    /// Non-empty parts in order (HPI, days ascending, follow-ups), separated by a blank line.
    pub assembled_text: String,
}

impl HospitalCourse {
    fn assemble(hpi_summary: String, daily_entries: Vec<DailyEntry>, followups: Vec<String>) -> Self {
        let parts: Vec<&str> = std::iter::once(hpi_summary.as_str())
            .chain(daily_entries.iter().map(|d| d.text.as_str()))
            .chain(followups.iter().map(String::as_str))
            .filter(|p| !p.trim().is_empty())
            .collect();
        let assembled_text = parts.join("\n\n");
        Self { hpi_summary, daily_entries, followups, assembled_text }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Segment {
    Hpi,
    Day(NaiveDate),
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Hpi => f.write_str("hpi"),
            Self::Day(d) => write!(f, "day {d}"),
        }
    }
}

#[derive(Debug, Error)]
#[error("admission {admission_id}, {segment}: {source}")]
pub struct SummarizeError {
    pub admission_id: String,
    pub segment: Segment,
    #[source]
    pub source: DecodeError,
}

fn join_notes<'a>(notes: impl IntoIterator<Item = &'a ClinicalNote>) -> String {
    notes
        .into_iter()
        .map(|n| n.text.trim())
        .filter(|t| !t.is_empty())
        .collect::<Vec<_>>()
        .join("\n\n")
}

fn summarize_segment<S>(
    scorer: &S,
    vocab: &MedicalVocabulary,
    source: &str,
    beam: &BeamConfig,
    config: &SummarizerConfig,
) -> Result<String, DecodeError>
where
    S: TokenScorer + ?Sized,
{
    let context = truncate_front(source, config.source_budget);
    let best = if config.constrain {
        // the banned set comes from the whole segment, not the truncated view
        let banned = banned_set_for_source(source, vocab);
        constrained_beam_search(scorer, context, &banned, beam)?
    } else {
        beam_search(scorer, context, beam)?
    };
    Ok(best.text(scorer.word_boundary()))
}

/// Generates the hospital course for one admission: an HPI summary, one
/// entry per day that has salient notes, and follow-up sentences copied
/// verbatim from notes near discharge.
pub fn summarize_admission<S>(
    record: &AdmissionRecord,
    scorer: &S,
    vocab: &MedicalVocabulary,
    classifiers: &Classifiers,
    config: &SummarizerConfig,
) -> Result<HospitalCourse, SummarizeError>
where
    S: TokenScorer + ?Sized,
{
    let segmented = segment_record(record);
    let fail = |segment| {
        move |source| SummarizeError {
            admission_id: record.admission_id.clone(),
            segment,
            source,
        }
    };

    let mut jobs: Vec<(Segment, String, &BeamConfig)> = vec![(
        Segment::Hpi,
        join_notes(&segmented.hpi_inputs),
        &config.hpi,
    )];
    for (day, notes) in &segmented.daily_inputs {
        let included = notes.iter().filter(|n| {
            classify_document(n, classifiers.document.as_ref(), &classifiers.overrides)
        });
        let source = join_notes(included);
        if !source.is_empty() {
            jobs.push((Segment::Day(*day), source, &config.daily));
        }
    }

    let run = |(segment, source, beam): &(Segment, String, &BeamConfig)| {
        summarize_segment(scorer, vocab, source, beam, config).map_err(fail(*segment))
    };
    let mut outputs: Vec<String> = if scorer.is_concurrent() {
        jobs.par_iter().map(run).collect::<Result<_, _>>()?
    } else {
        jobs.iter().map(run).collect::<Result<_, _>>()?
    };

    let daily_entries = jobs
        .iter()
        .skip(1)
        .zip(outputs.drain(1..))
        .filter_map(|((segment, _, _), text)| match segment {
            Segment::Day(day) => Some(DailyEntry { day: *day, text }),
            Segment::Hpi => None,
        })
        .collect();
    let hpi_summary = outputs.pop().unwrap_or_default();

    let mut seen = HashSet::new();
    let followups = segmented
        .followup_candidates
        .iter()
        .filter(|c| classify_followup(&c.sentence, classifiers.followup.as_ref()))
        .filter(|c| seen.insert(c.sentence.clone()))
        .map(|c| c.sentence.clone())
        .collect();

    Ok(HospitalCourse::assemble(hpi_summary, daily_entries, followups))
}
