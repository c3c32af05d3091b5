use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde_json::Value;

use hospcourse::corpus::extract_hospital_course;
use hospcourse::metrics::{
    classification_report, icc_consistency, mean_rouge, word_count_stats, ClassificationEntry,
    EvaluationReport, TaskReport,
};

use crate::error::CliError;
use crate::summarize::write_output;
use crate::{IccArgs, ReportArgs, RougeArgs};

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))
}

fn emit(out: Option<&Path>, report: &EvaluationReport) -> Result<(), CliError> {
    let mut body = serde_json::to_string_pretty(report).expect("report serializes");
    body.push('\n');
    write_output(out, &body)
}

/// `(id, text)` pairs from a JSON lines file. `fields` are tried in order;
/// a discharge summary is reduced to its hospital course section.
fn read_texts(path: &Path, fields: &[&str]) -> Result<Vec<(String, String)>, CliError> {
    let raw = read(path)?;
    let mut out = Vec::new();
    for (i, line) in raw.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let where_ = format!("{}:{}", path.display(), i + 1);
        let value: Value = serde_json::from_str(line).map_err(|e| CliError::parse(format!("{where_}: {e}")))?;
        let id = ["admission_id", "id"]
            .iter()
            .find_map(|k| value.get(*k).and_then(Value::as_str))
            .ok_or_else(|| CliError::parse(format!("{where_}: missing admission_id")))?;
        let text = fields
            .iter()
            .find_map(|k| value.get(*k).and_then(Value::as_str).map(|t| (*k, t)))
            .ok_or_else(|| CliError::parse(format!("{where_}: none of {} present", fields.join(", "))))?;
        let text = match text {
            ("discharge_summary_text", summary) => extract_hospital_course(summary)
                .map_err(|e| CliError::parse(format!("{where_}: {e}")))?
                .to_owned(),
            (_, t) => t.to_owned(),
        };
        out.push((id.to_owned(), text));
    }
    Ok(out)
}

pub fn rouge(args: RougeArgs) -> Result<(), CliError> {
    let candidates = read_texts(&args.candidates, &["hospital_course", "text"])?;
    let references = read_texts(&args.references, &["text", "discharge_summary_text"])?;
    let mut by_id: HashMap<String, String> = HashMap::new();
    for (id, text) in candidates {
        if by_id.insert(id.clone(), text).is_some() {
            return Err(CliError::parse(format!("duplicate candidate for {id}")));
        }
    }
    let mut pairs = Vec::with_capacity(references.len());
    for (id, reference) in references {
        let candidate = by_id
            .remove(&id)
            .ok_or_else(|| CliError::parse(format!("no candidate for {id}")))?;
        pairs.push((candidate, reference));
    }
    if let Some(id) = by_id.keys().min() {
        return Err(CliError::parse(format!("no reference for {id}")));
    }
    let cands: Vec<&str> = pairs.iter().map(|(c, _)| c.as_str()).collect();
    let refs: Vec<&str> = pairs.iter().map(|(_, r)| r.as_str()).collect();
    let task = TaskReport {
        task: args.task,
        pairs: pairs.len(),
        rouge: mean_rouge(&pairs)?,
        candidate_words: word_count_stats(&cands)?,
        reference_words: word_count_stats(&refs)?,
    };
    emit(args.out.as_deref(), &EvaluationReport { summaries: vec![task], ..Default::default() })
}

fn read_labels(path: &Path) -> Result<Vec<bool>, CliError> {
    read(path)?
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| match t {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(CliError::parse(format!("{}: expected 0 or 1, got {other:?}", path.display()))),
        })
        .collect()
}

pub fn report(args: ReportArgs) -> Result<(), CliError> {
    let predictions = read_labels(&args.predictions)?;
    let golds = read_labels(&args.golds)?;
    let metrics = classification_report(&predictions, &golds)?;
    let entry = ClassificationEntry { task: args.task, metrics };
    emit(args.out.as_deref(), &EvaluationReport { classification: vec![entry], ..Default::default() })
}

pub fn icc(args: IccArgs) -> Result<(), CliError> {
    let path = args.ratings.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(&args.ratings)
        .map_err(|e| CliError::parse(format!("{path}: {e}")))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::parse(format!("{path}: {e}")))?;
        let row = record
            .iter()
            .map(|cell| {
                cell.parse::<f64>()
                    .map_err(|_| CliError::parse(format!("{path}: row {}: not a number: {cell:?}", i + 1)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let result = icc_consistency(&rows)?;
    emit(args.out.as_deref(), &EvaluationReport { icc: Some(result), ..Default::default() })
}
