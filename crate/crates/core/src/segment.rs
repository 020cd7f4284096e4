//! Rule-based sentence segmentation with stable indices.
//!
//! Argumentative units downstream are sentences, so segmentation must be
//! deterministic: a boundary is terminal punctuation (`.` `!` `?`, possibly
//! followed by closing quotes or brackets), then whitespace, then a sentence
//! opener (uppercase letter, digit, or opening quote). Periods that end a
//! known abbreviation never split, and neither do ellipses or semicolons.
//! The abbreviation list ships as a data file, one lowercase entry per line.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

/// Bundled abbreviation list; [`Segmenter::default`] loads this.
pub const DEFAULT_ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");

/// One sentence of one post, addressable as `(doc_index, sent_index)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sentence {
    /// Position of the post within its conversation.
    pub doc_index: usize,
    /// Position of the sentence within its post.
    pub sent_index: usize,
    pub text: String,
    /// Byte offsets into the post body; `body[span.0..span.1] == text`.
    pub span: (usize, usize),
}

#[derive(Debug, thiserror::Error)]
pub enum SegmentError {
    #[error("post {doc_index} segments to zero sentences")]
    EmptyPost { doc_index: usize },
    #[error("cannot read abbreviation list {path}: {source}")]
    AbbreviationIo {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Sentence splitter with a configurable abbreviation exception list.
#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
}

impl Default for Segmenter {
    fn default() -> Self {
        Segmenter::from_list(DEFAULT_ABBREVIATIONS)
    }
}

impl Segmenter {
    /// Parse an abbreviation list: one lowercase entry per line, `#` comments.
    pub fn from_list(list: &str) -> Self {
        let abbreviations = list
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::to_string)
            .collect();
        Segmenter { abbreviations }
    }

    pub fn from_file(path: &Path) -> Result<Self, SegmentError> {
        let list = std::fs::read_to_string(path).map_err(|source| {
            SegmentError::AbbreviationIo {
                path: path.display().to_string(),
                source,
            }
        })?;
        Ok(Segmenter::from_list(&list))
    }

    /// Split one post body into sentences, assigning `sent_index` from 0.
    ///
    /// A body with no terminal punctuation yields a single sentence. Leading
    /// and trailing whitespace is excluded from each sentence's span, so the
    /// spans are ordered, non-overlapping, and cover the body text exactly up
    /// to inter-sentence whitespace.
    pub fn segment_post(&self, body: &str) -> Vec<Sentence> {
        let chars: Vec<(usize, char)> = body.char_indices().collect();
        let mut boundaries = Vec::new(); // byte offsets where a new sentence starts

        for (i, &(offset, ch)) in chars.iter().enumerate() {
            if !is_terminal(ch) {
                continue;
            }
            if ch == '.' && in_dot_run(&chars, i) {
                continue; // ellipsis
            }
            if ch == '.' && self.ends_abbreviation(body, offset) {
                continue;
            }
            // Skip closing quotes/brackets after the terminal mark.
            let mut j = i + 1;
            while j < chars.len() && is_closer(chars[j].1) {
                j += 1;
            }
            // Require whitespace, then a sentence opener.
            let mut k = j;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            if k == j || k == chars.len() {
                continue; // no whitespace gap, or end of body
            }
            if is_opener(chars[k].1) {
                boundaries.push(chars[k].0);
            }
        }

        let mut sentences = Vec::new();
        let mut start = 0usize;
        for &next_start in boundaries.iter().chain(std::iter::once(&body.len())) {
            if let Some(sent) = trim_to_sentence(body, start, next_start, sentences.len()) {
                sentences.push(sent);
            }
            start = next_start;
        }
        sentences
    }

    /// Segment every post of a conversation; `doc_index` is the post position.
    pub fn segment_conversation(
        &self,
        conv: &crate::corpus::Conversation,
    ) -> Result<Vec<Vec<Sentence>>, SegmentError> {
        let mut docs = Vec::with_capacity(conv.posts.len());
        for (doc_index, post) in conv.posts.iter().enumerate() {
            let mut sentences = self.segment_post(&post.body);
            if sentences.is_empty() {
                return Err(SegmentError::EmptyPost { doc_index });
            }
            for s in &mut sentences {
                s.doc_index = doc_index;
            }
            docs.push(sentences);
        }
        Ok(docs)
    }

    /// True when the period at `dot_offset` closes a listed abbreviation,
    /// e.g. the "dr." in "Dr. Smith". The token is scanned back to the
    /// previous whitespace and stripped of leading punctuation.
    fn ends_abbreviation(&self, body: &str, dot_offset: usize) -> bool {
        let before = &body[..dot_offset];
        let token_start = before
            .rfind(|c: char| c.is_whitespace())
            .map(|p| p + before[p..].chars().next().map_or(1, char::len_utf8))
            .unwrap_or(0);
        let raw = &body[token_start..dot_offset];
        let token: String = raw
            .chars()
            .skip_while(|c| !c.is_alphanumeric())
            .flat_map(char::to_lowercase)
            .collect();
        if token.is_empty() {
            return false;
        }
        self.abbreviations.contains(&format!("{token}."))
    }
}

fn is_terminal(ch: char) -> bool {
    matches!(ch, '.' | '!' | '?')
}

fn is_closer(ch: char) -> bool {
    matches!(ch, '"' | '\'' | ')' | ']' | '\u{201D}' | '\u{2019}')
}

fn is_opener(ch: char) -> bool {
    ch.is_uppercase()
        || ch.is_ascii_digit()
        || matches!(ch, '"' | '\'' | '(' | '[' | '\u{201C}' | '\u{2018}')
}

/// Part of a run of two or more dots (an ellipsis)?
fn in_dot_run(chars: &[(usize, char)], i: usize) -> bool {
    (i > 0 && chars[i - 1].1 == '.') || (i + 1 < chars.len() && chars[i + 1].1 == '.')
}

fn trim_to_sentence(body: &str, start: usize, end: usize, sent_index: usize) -> Option<Sentence> {
    let raw = &body[start..end];
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return None;
    }
    let lead = raw.len() - raw.trim_start().len();
    let span = (start + lead, start + lead + trimmed.len());
    Some(Sentence {
        doc_index: 0,
        sent_index,
        text: trimmed.to_string(),
        span,
    })
}

/// Segment a post body with the bundled abbreviation list.
pub fn segment_post(body: &str) -> Vec<Sentence> {
    Segmenter::default().segment_post(body)
}

/// Segment a conversation with the bundled abbreviation list.
pub fn segment_conversation(
    conv: &crate::corpus::Conversation,
) -> Result<Vec<Vec<Sentence>>, SegmentError> {
    Segmenter::default().segment_conversation(conv)
}
