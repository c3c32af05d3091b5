use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use hospcourse::vocab::{MedicalVocabulary, Term};

use crate::error::CliError;
use crate::VocabArgs;

fn lines(path: Option<&Path>) -> Result<Vec<(usize, String)>, CliError> {
    let Some(path) = path else { return Ok(Vec::new()) };
    let raw = fs::read_to_string(path).map_err(|e| CliError::io(&path.display().to_string(), e))?;
    Ok(raw
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| (i + 1, l.to_owned()))
        .collect())
}

fn term(path: &Path, line: usize, raw: &str) -> Result<Term, CliError> {
    Term::parse(raw).ok_or_else(|| {
        CliError::parse(format!("{}:{line}: {:?} has no words after normalization", path.display(), raw.trim()))
    })
}

pub fn run(args: VocabArgs) -> Result<(), CliError> {
    let mut terms = Vec::new();
    for (line, raw) in lines(args.terms.as_deref())? {
        terms.push(term(args.terms.as_deref().unwrap(), line, &raw)?);
    }
    let mut groups = Vec::new();
    for (line, raw) in lines(args.synonyms.as_deref())? {
        let path = args.synonyms.as_deref().unwrap();
        let group = raw
            .split('|')
            .map(|member| term(path, line, member))
            .collect::<Result<Vec<_>, _>>()?;
        groups.push(group);
    }
    let vocab = MedicalVocabulary::new(terms, groups);

    let out = args.out.display().to_string();
    let file = File::create(&args.out).map_err(|e| CliError::io(&out, e))?;
    let mut w = BufWriter::new(file);
    vocab
        .write_jsonl(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(&out, e))
}
