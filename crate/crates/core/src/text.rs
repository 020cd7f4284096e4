//! Shared text utilities: the metric tokenizer, stopwords, and n-grams.
//!
//! Every component that compares texts (ROUGE, novel n-grams, the lexical
//! scorers, the rank algorithms) goes through [`tokenize`] so the token
//! definition is stated exactly once: the text is lowercased and a token is
//! a maximal run of Unicode alphanumeric characters. Everything else
//! (punctuation, symbols, whitespace) separates tokens and is dropped.

use std::collections::HashSet;

/// Lowercase and split into maximal alphanumeric runs.
///
/// `"The cat sat."` → `["the", "cat", "sat"]`; `"don't"` → `["don", "t"]`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            for lower in ch.to_lowercase() {
                current.push(lower);
            }
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Function words excluded when comparing content.
pub const STOPWORDS: &[&str] = &[
    "a", "an", "the", "is", "are", "was", "were", "be", "been", "being", "am", "do", "does",
    "did", "has", "have", "had", "will", "would", "can", "could", "shall", "should", "may",
    "might", "must", "to", "of", "in", "on", "at", "for", "with", "by", "from", "as", "and",
    "or", "but", "if", "then", "than", "so", "it", "its", "this", "that", "these", "those",
    "i", "you", "he", "she", "we", "they", "me", "him", "her", "us", "them", "my", "your",
    "his", "our", "their", "there", "here", "what", "which", "who", "whom", "why", "how",
    "when", "where", "too", "very", "just", "about", "into", "over", "under", "again", "also",
    "s", "t", "d", "ll", "re", "ve", "m",
];

fn stopword_set() -> HashSet<&'static str> {
    STOPWORDS.iter().copied().collect()
}

/// Tokenize and drop stopwords, keeping duplicates and order.
pub fn content_tokens(text: &str) -> Vec<String> {
    let stop = stopword_set();
    tokenize(text)
        .into_iter()
        .filter(|t| !stop.contains(t.as_str()))
        .collect()
}

/// The set of distinct content words in a text.
pub fn content_word_set(text: &str) -> HashSet<String> {
    content_tokens(text).into_iter().collect()
}

/// Consecutive n-grams over a token slice, each joined with a single space.
pub fn ngrams(tokens: &[String], n: usize) -> Vec<String> {
    if n == 0 || tokens.len() < n {
        return Vec::new();
    }
    tokens.windows(n).map(|w| w.join(" ")).collect()
}

/// Dice/F1 overlap of two sets: `2|A∩B| / (|A|+|B|)`, 0 when both are empty.
pub fn set_f1(a: &HashSet<String>, b: &HashSet<String>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let common = a.intersection(b).count();
    2.0 * common as f64 / (a.len() + b.len()) as f64
}
