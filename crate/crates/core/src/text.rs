//! Word normalization shared by term matching, decoding constraints and ROUGE.
//!
//! A normalized word is lowercase, has no leading or trailing punctuation and
//! contains no whitespace. Text is split on Unicode whitespace; words that are
//! pure punctuation vanish.

/// Normalizes a single whitespace-free chunk. Returns `None` if nothing survives.
pub fn normalize_word(raw: &str) -> Option<String> {
    let trimmed = raw.trim_matches(|c: char| !c.is_alphanumeric());
    if trimmed.is_empty() {
        None
    } else {
        Some(trimmed.to_lowercase())
    }
}

/// Splits `text` on whitespace and normalizes each chunk, dropping empties.
pub fn normalize_words(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_word).collect()
}

/// Keeps the last `budget` whitespace tokens of `text`.
///
/// Clinical notes tend to state conclusions late, so the front is dropped.
/// The returned slice borrows from `text`.
pub fn truncate_front(text: &str, budget: usize) -> &str {
    if budget == 0 {
        return "";
    }
    let mut seen = 0usize;
    let mut in_word = false;
    // Walk backwards so the cut lands on the start of the budget-th word from the end.
    for (idx, ch) in text.char_indices().rev() {
        if ch.is_whitespace() {
            if in_word {
                seen += 1;
                in_word = false;
                if seen == budget {
                    return text[idx + ch.len_utf8()..].trim_end();
                }
            }
        } else {
            in_word = true;
        }
    }
    text.trim()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strips_case_and_edge_punctuation() {
        assert_eq!(
            normalize_words("  Mitral   Regurgitation. "),
            vec!["mitral", "regurgitation"]
        );
        assert_eq!(normalize_words("(HTN), s/p"), vec!["htn", "s/p"]);
        assert_eq!(normalize_words("... -- !"), Vec::<String>::new());
    }

    #[test]
    fn keeps_inner_punctuation() {
        assert_eq!(normalize_words("EF 15%. 2.5mg"), vec!["ef", "15", "2.5mg"]);
    }

    #[test]
    fn idempotent_on_normalized_words() {
        let once = normalize_words("Altered Mental-Status, [AGE] year-old!");
        let twice = normalize_words(&once.join(" "));
        assert_eq!(once, twice);
    }

    #[test]
    fn truncation_keeps_tail() {
        assert_eq!(truncate_front("a b c d", 2), "c d");
        assert_eq!(truncate_front("a b", 5), "a b");
        assert_eq!(truncate_front("  a\n b  c ", 2), "b  c");
        assert_eq!(truncate_front("a b", 0), "");
    }
}
