//! Shared tokenization rules.
//!
//! Two flavors are used across the crate and must stay consistent:
//! word *counting* splits on whitespace only, while *vocabulary* tokens are
//! additionally stripped of leading/trailing punctuation. Word matching for
//! script/subtitle alignment keeps intra-word apostrophes and drops all other
//! non-alphanumerics.

/// Lowercased whitespace tokens; used wherever words are counted.
pub fn count_tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(|w| w.to_lowercase()).collect()
}

/// Lowercased whitespace tokens with leading/trailing punctuation stripped;
/// empty tokens dropped. Used for vocabularies and all caption metrics.
pub fn vocab_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(|w| {
            w.trim_matches(|c: char| !c.is_alphanumeric())
                .to_lowercase()
        })
        .filter(|w| !w.is_empty())
        .collect()
}

/// Normalize one word for overlap matching: lowercase, keep alphanumerics and
/// apostrophes that sit between alphanumerics.
pub fn match_word(word: &str) -> String {
    let lower = word.to_lowercase();
    let chars: Vec<char> = lower.chars().collect();
    let mut out = String::with_capacity(chars.len());
    for (i, &c) in chars.iter().enumerate() {
        if c.is_alphanumeric() {
            out.push(c);
        } else if c == '\'' || c == '\u{2019}' {
            let prev_alnum = i > 0 && chars[i - 1].is_alphanumeric();
            let next_alnum = i + 1 < chars.len() && chars[i + 1].is_alphanumeric();
            if prev_alnum && next_alnum {
                out.push('\'');
            }
        }
    }
    out
}

/// Matching tokens for a whole string; empty tokens dropped.
pub fn match_tokens(text: &str) -> Vec<String> {
    text.split_whitespace()
        .map(match_word)
        .filter(|w| !w.is_empty())
        .collect()
}

/// Canonical sentence form for exact-match comparisons (uniqueness, novelty).
pub fn normalize_sentence(text: &str) -> String {
    vocab_tokens(text).join(" ")
}
