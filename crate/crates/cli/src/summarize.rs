use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use hospcourse::corpus::{
    default_override_rules, extract_hospital_course, load_corpus, load_override_rules,
    split_corpus, summarize_admission, AdmissionRecord, Classifiers, HospitalCourse, SplitRatios,
    SummarizerConfig,
};
use hospcourse::decode::BeamConfig;
use hospcourse::scorer::{
    connect_external_scorer, train_ngram_scorer, Endpoint, ExternalConfig, NgramScorer,
    SourceBiasedScorer, TokenScorer,
};
use hospcourse::vocab::load_vocabulary;

use crate::error::CliError;
use crate::{NgramArgs, SummarizeArgs, Switch};

/// Trains the builtin scorer on the reference hospital courses of the
/// seeded training split. Records without a recognizable section contribute
/// their note texts instead.
pub fn train_builtin(records: &[AdmissionRecord], ngram: &NgramArgs) -> Result<NgramScorer, CliError> {
    let (train, _, _) = split_corpus(records.to_vec(), SplitRatios::default(), ngram.seed)?;
    let texts: Vec<String> = train
        .iter()
        .flat_map(|r| match extract_hospital_course(&r.discharge_summary_text) {
            Ok(course) => vec![course.to_owned()],
            Err(_) => r.notes.iter().map(|n| n.text.clone()).collect(),
        })
        .filter(|t| !t.trim().is_empty())
        .collect();
    if texts.is_empty() {
        return Err(CliError::corpus("no training text for the builtin scorer"));
    }
    train_ngram_scorer(&texts, ngram.ngram_order, ngram.alpha)
        .map_err(|e| CliError::config(format!("builtin scorer: {e}")))
}

#[derive(Serialize)]
struct DailyOut<'a> {
    day: String,
    text: &'a str,
}

#[derive(Serialize)]
struct Segments<'a> {
    hpi: &'a str,
    daily: Vec<DailyOut<'a>>,
    followups: &'a [String],
}

#[derive(Serialize)]
struct OutputLine<'a> {
    admission_id: &'a str,
    hospital_course: &'a str,
    segments: Segments<'a>,
}

fn output_line(id: &str, course: &HospitalCourse) -> String {
    let line = OutputLine {
        admission_id: id,
        hospital_course: &course.assembled_text,
        segments: Segments {
            hpi: &course.hpi_summary,
            daily: course
                .daily_entries
                .iter()
                .map(|d| DailyOut { day: d.day.to_string(), text: &d.text })
                .collect(),
            followups: &course.followups,
        },
    };
    serde_json::to_string(&line).expect("output serializes")
}

fn build_scorer(args: &SummarizeArgs, records: &[AdmissionRecord]) -> Result<Box<dyn TokenScorer>, CliError> {
    if args.scorer == "builtin" {
        let ngram = train_builtin(records, &args.ngram)?;
        if args.source_weight > 0.0 {
            return Ok(Box::new(SourceBiasedScorer::new(ngram, args.source_weight, args.source_budget)?));
        }
        if args.source_weight < 0.0 {
            return Err(CliError::config("--source-weight must be in [0, 1]"));
        }
        return Ok(Box::new(ngram));
    }
    let endpoint: Endpoint = args.scorer.parse().map_err(CliError::config)?;
    if args.source_weight != 0.0 {
        return Err(CliError::config("--source-weight applies to the builtin scorer only"));
    }
    if args.top_k == 0 {
        return Err(CliError::config("--top-k must be at least 1"));
    }
    let config = ExternalConfig {
        timeout: Duration::from_millis(args.timeout_ms.max(1)),
        top_k: args.top_k,
        source_budget: args.source_budget,
    };
    Ok(Box::new(connect_external_scorer(&endpoint, config)?))
}

pub fn write_output(out: Option<&Path>, body: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
            let mut w = BufWriter::new(file);
            w.write_all(body.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(&path.display().to_string(), e))
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            lock.write_all(body.as_bytes())
                .and_then(|_| lock.flush())
                .map_err(|e| CliError::io("stdout", e))
        }
    }
}

pub fn run(args: SummarizeArgs) -> Result<(), CliError> {
    let hpi = BeamConfig {
        beam_width: args.beam_width,
        max_len: args.hpi_max_len,
        length_penalty: args.length_penalty,
    };
    let daily = BeamConfig { max_len: args.max_len, ..hpi.clone() };
    for beam in [&hpi, &daily] {
        beam.validate().map_err(|e| CliError::config(e.to_string()))?;
    }
    if args.jobs == 0 {
        return Err(CliError::config("--jobs must be at least 1"));
    }
    let config = SummarizerConfig {
        hpi,
        daily,
        constrain: args.constrain == Switch::On,
        source_budget: args.source_budget,
    };

    let vocab = load_vocabulary(&args.vocab)
        .map_err(|e| CliError::config(format!("{}: {e}", args.vocab.display())))?;
    let overrides = match &args.overrides {
        Some(path) => load_override_rules(path).map_err(|e| CliError::config(format!("overrides: {e}")))?,
        None => default_override_rules(),
    };
    let records = load_corpus(&args.corpus)
        .map_err(|e| CliError::corpus(format!("{}: {e}", args.corpus.display())))?;
    let scorer = build_scorer(&args, &records)?;
    let classifiers = Classifiers { overrides, ..Classifiers::default() };

    let summarize = |r: &AdmissionRecord| {
        summarize_admission(r, scorer.as_ref(), &vocab, &classifiers, &config)
            .map(|course| output_line(&r.admission_id, &course))
    };
    let lines: Vec<String> = if args.jobs == 1 {
        records.iter().map(summarize).collect::<Result<_, _>>()?
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build()
            .map_err(|e| CliError::config(e.to_string()))?;
        pool.install(|| records.par_iter().map(summarize).collect::<Result<_, _>>())?
    };

    let mut body = lines.join("\n");
    if !body.is_empty() {
        body.push('\n');
    }
    write_output(args.out.as_deref(), &body)
}
