mod error;
mod eval;
mod serve;
mod summarize;
mod vocab;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use error::CliError;

#[derive(Parser)]
#[command(name = "hospcourse", version, about = "Generate and evaluate hospital-course summaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Summarize every admission in a corpus file.
    Summarize(SummarizeArgs),
    /// Compute evaluation metrics.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Build a vocabulary file from term and synonym lists.
    VocabBuild(VocabArgs),
    /// Serve the builtin n-gram scorer over the scorer wire protocol.
    ServeScorer(ServeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

/// Options for the builtin n-gram scorer.
#[derive(Args, Clone)]
struct NgramArgs {
    /// n-gram order of the builtin scorer.
    #[arg(long, default_value_t = 3)]
    ngram_order: usize,
    /// Add-alpha smoothing of the builtin scorer.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Seed for the train/validation/test split the builtin scorer learns from.
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct SummarizeArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    /// `builtin`, `tcp://host:port` or `exec:<command>`.
    #[arg(long, default_value = "builtin")]
    scorer: String,
    #[arg(long, default_value_t = 4)]
    beam_width: usize,
    /// Token limit for each daily entry.
    #[arg(long, default_value_t = 40)]
    max_len: usize,
    /// Token limit for the HPI summary.
    #[arg(long, default_value_t = 64)]
    hpi_max_len: usize,
    #[arg(long, value_enum, default_value = "on")]
    constrain: Switch,
    /// JSON-lines override rules; the builtin rules apply when omitted.
    #[arg(long)]
    overrides: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Admissions summarized in parallel.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0.0)]
    length_penalty: f64,
    /// Per-request deadline for external scorers.
    #[arg(long, default_value_t = 30_000)]
    timeout_ms: u64,
    /// Entries requested from external scorers per step.
    #[arg(long, default_value_t = 64)]
    top_k: usize,
    /// Source words, counted from the end, given to the scorer.
    #[arg(long, default_value_t = 1024)]
    source_budget: usize,
    /// Weight of a copy distribution over source words mixed into the builtin scorer.
    #[arg(long, default_value_t = 0.0)]
    source_weight: f64,
    #[command(flatten)]
    ngram: NgramArgs,
}

#[derive(Subcommand)]
enum EvalCommand {
    /// ROUGE recall and word counts of candidates against references.
    Rouge(RougeArgs),
    /// Classification report of 0/1 predictions against gold labels.
    Report(ReportArgs),
    /// Consistency ICC of a subjects-by-raters CSV.
    Icc(IccArgs),
}

#[derive(Args)]
struct RougeArgs {
    /// JSON lines with `admission_id` and `hospital_course` or `text`.
    #[arg(long)]
    candidates: PathBuf,
    /// JSON lines with `admission_id` and `text`, or corpus records.
    #[arg(long)]
    references: PathBuf,
    #[arg(long, default_value = "hospital_course")]
    task: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long)]
    golds: PathBuf,
    #[arg(long, default_value = "classification")]
    task: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct IccArgs {
    #[arg(long)]
    ratings: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VocabArgs {
    /// One term per line.
    #[arg(long)]
    terms: Option<PathBuf>,
    /// One synonym group per line, members separated by `|`.
    #[arg(long)]
    synonyms: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    /// Corpus whose training split the scorer learns from.
    #[arg(long)]
    corpus: PathBuf,
    /// Address to listen on; standard input and output when omitted.
    #[arg(long)]
    listen: Option<String>,
    #[command(flatten)]
    ngram: NgramArgs,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Summarize(args) => summarize::run(args),
        Command::Eval(EvalCommand::Rouge(args)) => eval::rouge(args),
        Command::Eval(EvalCommand::Report(args)) => eval::report(args),
        Command::Eval(EvalCommand::Icc(args)) => eval::icc(args),
        Command::VocabBuild(args) => vocab::run(args),
        Command::ServeScorer(args) => serve::run(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("{}", CliError::config(line));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
