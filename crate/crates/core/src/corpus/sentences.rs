use std::ops::Range;

const ABBREVIATIONS: &[&str] = &[
    "dr", "drs", "mr", "mrs", "ms", "prof", "st", "vs", "etc", "e.g", "i.e", "approx", "pt", "pts",
    "no", "fig", "jr", "sr", "hx", "dx", "tx", "sx", "b.i.d", "t.i.d", "q.i.d", "q.d", "p.o", "a.m",
    "p.m", "min", "max", "hr", "hrs", "wk", "wks", "yo", "y.o",
];

const TERMINATORS: &[char] = &['.', '!', '?'];
const CLOSERS: &[char] = &['"', '\'', ')', ']', '}'];
const BULLETS: &[char] = &['-', '*', '•'];

/// Byte ranges of sentences in `text`, trimmed of surrounding whitespace.
///
/// Boundaries fall after `.`, `!` or `?` (plus closing quotes or brackets)
/// when whitespace and a non-lowercase character follow, unless the period
/// ends a known abbreviation, a single-letter initial, or a list number at
/// the start of a line. Blank lines and bulleted lines also start a new
/// sentence.
pub fn sentence_spans(text: &str) -> Vec<Range<usize>> {
    let mut cuts = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0;
    while i < chars.len() {
        let (pos, c) = chars[i];
        if TERMINATORS.contains(&c) {
            let mut j = i + 1;
            while j < chars.len() && (TERMINATORS.contains(&chars[j].1) || CLOSERS.contains(&chars[j].1)) {
                j += 1;
            }
            let cut = chars.get(j).map_or(text.len(), |(p, _)| *p);
            if j == chars.len() {
                cuts.push(cut);
            } else if chars[j].1.is_whitespace() {
                let next = chars[j..].iter().find(|(_, ch)| !ch.is_whitespace());
                let lowercase_next = next.is_some_and(|(_, ch)| ch.is_lowercase());
                let keeps_going = c == '.' && is_non_final_period(text, pos);
                if !lowercase_next && !keeps_going {
                    cuts.push(cut);
                }
            }
            i = j;
            continue;
        }
        if c == '\n' {
            let rest = &text[pos + 1..];
            let line = rest.split('\n').next().unwrap_or("");
            let trimmed = line.trim_start();
            if line.trim().is_empty() || trimmed.starts_with(BULLETS) {
                cuts.push(pos);
            }
        }
        i += 1;
    }
    cuts.push(text.len());

    let mut spans = Vec::new();
    let mut start = 0;
    for cut in cuts {
        if cut < start {
            continue;
        }
        let piece = &text[start..cut];
        let lead = piece.len() - piece.trim_start().len();
        let trimmed = piece.trim();
        if !trimmed.is_empty() {
            spans.push(start + lead..start + lead + trimmed.len());
        }
        start = cut;
    }
    spans
}

fn is_non_final_period(text: &str, period: usize) -> bool {
    let before = &text[..period];
    let word_start = before
        .rfind(char::is_whitespace)
        .map_or(0, |p| p + before[p..].chars().next().map_or(1, char::len_utf8));
    let raw = &before[word_start..];
    let word = raw.trim_start_matches(|c: char| !c.is_alphanumeric()).to_lowercase();
    if word.is_empty() {
        return false;
    }
    if ABBREVIATIONS.contains(&word.as_str()) {
        return true;
    }
    let mut letters = word.chars();
    if let (Some(first), None) = (letters.next(), letters.next()) {
        if first.is_alphabetic() {
            return true;
        }
    }
    // "1." at the start of a line is list numbering
    let line_start = before[..word_start].rfind('\n').map_or(0, |p| p + 1);
    word.chars().all(|c| c.is_ascii_digit()) && before[line_start..word_start].trim().is_empty()
}

pub fn split_sentences(text: &str) -> Vec<&str> {
    sentence_spans(text).into_iter().map(|r| &text[r]).collect()
}
