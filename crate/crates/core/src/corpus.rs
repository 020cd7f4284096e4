//! Conversation ingestion and eligibility filtering.
//!
//! Conversations arrive as JSONL, one conversation per line (see
//! [`parse_corpus`] for the schema). After parsing, [`check_eligibility`]
//! applies the length and rating filters that decide whether a thread is
//! usable as a summarization example.

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

/// What kind of contribution a post is within its thread.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Comment,
    Answer,
    AnswerComment,
    Email,
    ForumPost,
}

/// Source family of a conversation; decides which eligibility variant applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Nyt,
    Reddit,
    Stack,
    Email,
    Generic,
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Domain::Nyt => "nyt",
            Domain::Reddit => "reddit",
            Domain::Stack => "stack",
            Domain::Email => "email",
            Domain::Generic => "generic",
        };
        f.write_str(s)
    }
}

/// One post (answer, comment, or email) in a conversation thread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Post {
    pub post_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub author: Option<String>,
    /// Community upvotes minus downvotes, where the source provides one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub score: Option<i64>,
    pub role: Role,
    pub body: String,
    /// Reply-to link: another post_id in the same conversation, or the
    /// conv_id for replies to the thread root.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<String>,
}

/// A thread of posts plus the metadata shown alongside it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conversation {
    pub conv_id: String,
    pub domain: Domain,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    /// Extra context for the thread, e.g. an article headline, keywords, or
    /// an extractive snippet for news comments.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
    pub posts: Vec<Post>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_summary: Option<String>,
}

/// Errors raised while reading or validating a corpus file.
#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("cannot open corpus file {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: malformed record: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: conversation {conv_id:?}: post {post_index} has an empty body")]
    EmptyBody {
        line: usize,
        conv_id: String,
        post_index: usize,
    },
    #[error("line {line}: duplicate conv_id {conv_id:?}")]
    DuplicateConvId { line: usize, conv_id: String },
    #[error(
        "line {line}: conversation {conv_id:?}: post {post_id:?} has dangling parent_id {parent_id:?}"
    )]
    DanglingParent {
        line: usize,
        conv_id: String,
        post_id: String,
        parent_id: String,
    },
}

/// Supported corpus file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    Jsonl,
}

/// Count words: maximal non-whitespace runs after NFC normalization.
///
/// This is the unit of measure for every length filter and statistic.
pub fn word_count(text: &str) -> usize {
    text.nfc().collect::<String>().split_whitespace().count()
}

/// Read a JSONL corpus, one conversation per line.
///
/// Schema per line:
/// `{"conv_id": str, "domain": str, "title": str?, "context": str?,
///   "tags": [str], "reference_summary": str?, "posts": [{"post_id": str,
///   "author": str?, "score": int?, "role": str, "body": str,
///   "parent_id": str?, "timestamp": str?}]}`
///
/// Blank lines are ignored. Anything else that fails to parse is an error
/// carrying its line number; so are duplicate `conv_id`s, empty post bodies,
/// and `parent_id`s that point at nothing in the thread.
pub fn parse_corpus(path: &Path, format: CorpusFormat) -> Result<Vec<Conversation>, CorpusError> {
    let CorpusFormat::Jsonl = format;
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut conversations = Vec::new();
    let mut seen_ids: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let conv: Conversation =
            serde_json::from_str(&line).map_err(|e| CorpusError::Malformed {
                line: line_no,
                message: e.to_string(),
            })?;
        validate_conversation(&conv, line_no)?;
        if !seen_ids.insert(conv.conv_id.clone()) {
            return Err(CorpusError::DuplicateConvId {
                line: line_no,
                conv_id: conv.conv_id,
            });
        }
        conversations.push(conv);
    }
    Ok(conversations)
}

fn validate_conversation(conv: &Conversation, line: usize) -> Result<(), CorpusError> {
    let ids: HashSet<&str> = conv.posts.iter().map(|p| p.post_id.as_str()).collect();
    for (post_index, post) in conv.posts.iter().enumerate() {
        if post.body.split_whitespace().next().is_none() {
            return Err(CorpusError::EmptyBody {
                line,
                conv_id: conv.conv_id.clone(),
                post_index,
            });
        }
        if let Some(parent) = &post.parent_id {
            if parent != &conv.conv_id && !ids.contains(parent.as_str()) {
                return Err(CorpusError::DanglingParent {
                    line,
                    conv_id: conv.conv_id.clone(),
                    post_id: post.post_id.clone(),
                    parent_id: parent.clone(),
                });
            }
        }
    }
    Ok(())
}

/// Serialize conversations back to JSONL (UTF-8, LF line endings).
///
/// `parse_corpus ∘ write_corpus` is a fixed point on parsed corpora.
pub fn write_corpus<W: Write>(mut out: W, conversations: &[Conversation]) -> std::io::Result<()> {
    for conv in conversations {
        let line = serde_json::to_string(conv).expect("conversation serializes");
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

/// The individual filters a conversation can violate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EligibilityRule {
    TooFewPosts,
    LongestPostOverLimit,
    TotalLengthOutOfRange,
    AvgLengthOutOfRange,
    NegativeScorePostsPresent,
}

/// Outcome of the eligibility filters for one conversation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EligibilityReport {
    pub eligible: bool,
    pub violated_rules: Vec<EligibilityRule>,
}

impl EligibilityReport {
    /// Build a report; `eligible` is true iff no rule was violated.
    pub fn from_violations(violated_rules: Vec<EligibilityRule>) -> Self {
        EligibilityReport {
            eligible: violated_rules.is_empty(),
            violated_rules,
        }
    }
}

/// Thresholds for the eligibility filters. The defaults are the published
/// ones; the NYT total-length ceiling is the one knob left configurable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EligibilityConfig {
    /// Minimum post count (email threads use `min_posts_email`).
    pub min_posts: usize,
    pub min_posts_email: usize,
    /// Longest single post may not exceed this many words.
    pub max_post_words: usize,
    /// Inclusive bounds on the summed post length.
    pub total_words_min: usize,
    pub total_words_max: usize,
    /// Replacement total-length ceiling for the nyt domain.
    pub nyt_total_words_max: usize,
    /// Inclusive bounds on the mean post length.
    pub avg_words_min: usize,
    pub avg_words_max: usize,
}

impl Default for EligibilityConfig {
    fn default() -> Self {
        EligibilityConfig {
            min_posts: 5,
            min_posts_email: 4,
            max_post_words: 400,
            total_words_min: 100,
            total_words_max: 1400,
            nyt_total_words_max: 2048,
            avg_words_min: 50,
            avg_words_max: 300,
        }
    }
}

/// Apply the eligibility filters with the default thresholds.
pub fn check_eligibility(conv: &Conversation) -> EligibilityReport {
    check_eligibility_with(conv, &EligibilityConfig::default())
}

/// Apply the eligibility filters:
///
/// 1. at least 5 posts (4 for email threads);
/// 2. longest post at most 400 words;
/// 3. summed post length within `[100, 1400]` words inclusive (nyt uses its
///    own ceiling);
/// 4. mean post length within `[50, 300]` words inclusive;
/// 5. stack only: no post with a negative community score.
///
/// Title, context, and tags do not count toward the length rules. Range
/// checks are exact: the mean test compares `total` against
/// `bound × post_count` in integers.
pub fn check_eligibility_with(
    conv: &Conversation,
    cfg: &EligibilityConfig,
) -> EligibilityReport {
    let mut violations = Vec::new();
    let lengths: Vec<usize> = conv.posts.iter().map(|p| word_count(&p.body)).collect();
    let n = lengths.len();
    let total: usize = lengths.iter().sum();
    let longest = lengths.iter().copied().max().unwrap_or(0);

    let min_posts = if conv.domain == Domain::Email {
        cfg.min_posts_email
    } else {
        cfg.min_posts
    };
    if n < min_posts {
        violations.push(EligibilityRule::TooFewPosts);
    }
    if longest > cfg.max_post_words {
        violations.push(EligibilityRule::LongestPostOverLimit);
    }
    let total_max = if conv.domain == Domain::Nyt {
        cfg.nyt_total_words_max
    } else {
        cfg.total_words_max
    };
    if total < cfg.total_words_min || total > total_max {
        violations.push(EligibilityRule::TotalLengthOutOfRange);
    }
    if n > 0 && (total < cfg.avg_words_min * n || total > cfg.avg_words_max * n) {
        violations.push(EligibilityRule::AvgLengthOutOfRange);
    }
    if conv.domain == Domain::Stack
        && conv.posts.iter().any(|p| p.score.is_some_and(|s| s < 0))
    {
        violations.push(EligibilityRule::NegativeScorePostsPresent);
    }

    EligibilityReport::from_violations(violations)
}
