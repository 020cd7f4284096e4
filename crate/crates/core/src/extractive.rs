//! Unsupervised extractive baselines and the greedy extractive oracle.
//!
//! Both rank algorithms share one engine: build a sentence-similarity
//! matrix, row-normalize it into a transition matrix (rows with no mass
//! become uniform teleports), damp it, and power-iterate to the stationary
//! distribution. They differ only in the similarity:
//!
//! * [`lexrank`] — TF-IDF cosine similarity, binarized strictly above a
//!   threshold. `idf(w) = 1 + ln(N / df(w))` over the sentence collection.
//! * [`textrank`] — shared content-word types normalized by sentence
//!   lengths, `|overlap| / (ln|Sᵢ| + ln|Sⱼ|)`; a non-positive normalizer
//!   makes the edge weight 0.
//!
//! The oracle greedily grows a selection that maximizes the mean of
//! ROUGE-1 and ROUGE-2 F1 against a reference summary, an upper bound for
//! extractive systems under this objective.

use std::collections::{HashMap, HashSet};

use crate::corpus::word_count;
use crate::metrics::rouge_n;
use crate::segment::Sentence;
use crate::text;

/// A sentence with its rank score; output order matches input order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSentence {
    pub sentence: Sentence,
    pub score: f64,
}

/// An extractive selection in source order.
///
/// The selected word count stays within `budget_tokens` unless the single
/// highest-ranked sentence alone exceeds it.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractiveSummary {
    pub selected: Vec<Sentence>,
    pub budget_tokens: usize,
}

impl ExtractiveSummary {
    pub fn text(&self) -> String {
        self.selected
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub const DEFAULT_DAMPING: f64 = 0.85;
pub const DEFAULT_SIMILARITY_THRESHOLD: f64 = 0.1;
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
/// Default extraction budget: the summary-length cap in tokens.
pub const DEFAULT_BUDGET_TOKENS: usize = 90;

/// Rank sentences by TF-IDF-cosine centrality.
pub fn lexrank(
    sentences: &[Sentence],
    damping: f64,
    similarity_threshold: f64,
    tol: f64,
) -> Vec<RankedSentence> {
    let weights = lexrank_adjacency(sentences, similarity_threshold);
    rank_with(sentences, &weights, damping, tol)
}

/// Rank sentences by normalized content-word-overlap centrality.
pub fn textrank(sentences: &[Sentence], damping: f64, tol: f64) -> Vec<RankedSentence> {
    let weights = textrank_weights(sentences);
    rank_with(sentences, &weights, damping, tol)
}

fn rank_with(
    sentences: &[Sentence],
    weights: &[Vec<f64>],
    damping: f64,
    tol: f64,
) -> Vec<RankedSentence> {
    let scores = stationary_distribution(weights, damping, tol);
    sentences
        .iter()
        .zip(scores)
        .map(|(sentence, score)| RankedSentence {
            sentence: sentence.clone(),
            score,
        })
        .collect()
}

/// Binarized TF-IDF cosine adjacency, no self-loops.
fn lexrank_adjacency(sentences: &[Sentence], threshold: f64) -> Vec<Vec<f64>> {
    let n = sentences.len();
    let token_lists: Vec<Vec<String>> =
        sentences.iter().map(|s| text::tokenize(&s.text)).collect();

    let mut document_frequency: HashMap<&str, usize> = HashMap::new();
    for tokens in &token_lists {
        let types: HashSet<&str> = tokens.iter().map(String::as_str).collect();
        for t in types {
            *document_frequency.entry(t).or_insert(0) += 1;
        }
    }
    let idf = |term: &str| 1.0 + (n as f64 / document_frequency[term] as f64).ln();

    let vectors: Vec<HashMap<&str, f64>> = token_lists
        .iter()
        .map(|tokens| {
            let mut tf: HashMap<&str, f64> = HashMap::new();
            for t in tokens {
                *tf.entry(t.as_str()).or_insert(0.0) += 1.0;
            }
            for (term, v) in tf.iter_mut() {
                *v *= idf(term);
            }
            tf
        })
        .collect();
    let norms: Vec<f64> = vectors
        .iter()
        .map(|v| v.values().map(|x| x * x).sum::<f64>().sqrt())
        .collect();

    let mut adjacency = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let cosine = if norms[i] > 0.0 && norms[j] > 0.0 {
                let dot: f64 = vectors[i]
                    .iter()
                    .filter_map(|(term, a)| vectors[j].get(term).map(|b| a * b))
                    .sum();
                dot / (norms[i] * norms[j])
            } else {
                0.0
            };
            if cosine > threshold {
                adjacency[i][j] = 1.0;
                adjacency[j][i] = 1.0;
            }
        }
    }
    adjacency
}

/// Overlap weights `|types_i ∩ types_j| / (ln|Sᵢ| + ln|Sⱼ|)`.
fn textrank_weights(sentences: &[Sentence]) -> Vec<Vec<f64>> {
    let n = sentences.len();
    let lengths: Vec<usize> = sentences
        .iter()
        .map(|s| text::tokenize(&s.text).len())
        .collect();
    let content: Vec<HashSet<String>> = sentences
        .iter()
        .map(|s| text::content_word_set(&s.text))
        .collect();

    let mut weights = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let normalizer = (lengths[i].max(1) as f64).ln() + (lengths[j].max(1) as f64).ln();
            if normalizer <= 0.0 {
                continue;
            }
            let overlap = content[i].intersection(&content[j]).count();
            let w = overlap as f64 / normalizer;
            weights[i][j] = w;
            weights[j][i] = w;
        }
    }
    weights
}

/// Damped random-walk stationary distribution over a weight matrix.
///
/// Rows are normalized to transition probabilities; rows without mass
/// teleport uniformly. Iteration runs until the L1 change drops below
/// `tol`, so the result `p` satisfies `p ≈ (1-d)/n + d·Mᵀp` and sums to 1.
fn stationary_distribution(weights: &[Vec<f64>], damping: f64, tol: f64) -> Vec<f64> {
    let n = weights.len();
    if n == 0 {
        return Vec::new();
    }
    let uniform = 1.0 / n as f64;
    let transition: Vec<Vec<f64>> = weights
        .iter()
        .map(|row| {
            let sum: f64 = row.iter().sum();
            if sum > 0.0 {
                row.iter().map(|w| w / sum).collect()
            } else {
                vec![uniform; n]
            }
        })
        .collect();

    let mut p = vec![uniform; n];
    for _ in 0..10_000 {
        let mut next = vec![(1.0 - damping) * uniform; n];
        for i in 0..n {
            let mass = damping * p[i];
            for j in 0..n {
                next[j] += mass * transition[i][j];
            }
        }
        let delta: f64 = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
        p = next;
        if delta < tol {
            break;
        }
    }
    p
}

/// Take sentences by descending score until the budget is exhausted, then
/// reorder the selection to source order.
///
/// Score ties go to earlier source position. Selection stops at the first
/// sentence that would overflow the budget; if nothing is selected yet and
/// the budget is positive, that sentence is taken alone.
pub fn extract_top(ranked: &[RankedSentence], budget_tokens: usize) -> ExtractiveSummary {
    let mut order: Vec<usize> = (0..ranked.len()).collect();
    order.sort_by(|&a, &b| {
        ranked[b]
            .score
            .partial_cmp(&ranked[a].score)
            .expect("rank scores are finite")
            .then_with(|| source_key(&ranked[a].sentence).cmp(&source_key(&ranked[b].sentence)))
    });

    let mut chosen: Vec<usize> = Vec::new();
    let mut total = 0usize;
    for idx in order {
        let len = word_count(&ranked[idx].sentence.text);
        if total + len <= budget_tokens {
            chosen.push(idx);
            total += len;
        } else {
            if chosen.is_empty() && budget_tokens > 0 {
                chosen.push(idx);
            }
            break;
        }
    }
    chosen.sort_by_key(|&i| source_key(&ranked[i].sentence));
    ExtractiveSummary {
        selected: chosen.iter().map(|&i| ranked[i].sentence.clone()).collect(),
        budget_tokens,
    }
}

fn source_key(s: &Sentence) -> (usize, usize) {
    (s.doc_index, s.sent_index)
}

/// One greedy oracle step: which sentence was added and the objective after.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleStep {
    /// Index into the input sentence list.
    pub sentence_index: usize,
    /// Mean of ROUGE-1 and ROUGE-2 F1 after adding it.
    pub objective: f64,
}

/// Mean of ROUGE-1 and ROUGE-2 F1 — the oracle's objective.
pub fn oracle_objective(candidate: &str, reference: &str) -> f64 {
    let r1 = rouge_n(candidate, reference, 1);
    let r2 = rouge_n(candidate, reference, 2);
    (r1.f1 + r2.f1) / 2.0
}

/// Greedy trace of the extractive oracle.
///
/// Starting from an empty selection with objective 0, each step adds the
/// within-budget sentence that maximizes the objective (ties to earliest
/// source position), stopping when no sentence strictly improves it or none
/// fits the budget. The objective is strictly increasing along the trace.
pub fn extractive_oracle_trace(
    sentences: &[Sentence],
    reference: &str,
    budget_tokens: usize,
) -> Vec<OracleStep> {
    let lengths: Vec<usize> = sentences.iter().map(|s| word_count(&s.text)).collect();
    let mut selected: Vec<usize> = Vec::new();
    let mut total = 0usize;
    let mut objective = 0.0;
    let mut steps = Vec::new();

    loop {
        let mut best: Option<(usize, f64)> = None;
        for i in 0..sentences.len() {
            if selected.contains(&i) || total + lengths[i] > budget_tokens {
                continue;
            }
            let mut candidate = selected.clone();
            candidate.push(i);
            candidate.sort_unstable();
            let joined = candidate
                .iter()
                .map(|&k| sentences[k].text.as_str())
                .collect::<Vec<_>>()
                .join(" ");
            let obj = oracle_objective(&joined, reference);
            if obj > objective && best.map_or(true, |(_, b)| obj > b) {
                best = Some((i, obj));
            }
        }
        match best {
            Some((i, obj)) => {
                selected.push(i);
                total += lengths[i];
                objective = obj;
                steps.push(OracleStep {
                    sentence_index: i,
                    objective: obj,
                });
            }
            None => break,
        }
    }
    steps
}

/// Best greedy extractive selection against a reference summary.
pub fn extractive_oracle(
    sentences: &[Sentence],
    reference: &str,
    budget_tokens: usize,
) -> ExtractiveSummary {
    let mut indices: Vec<usize> = extractive_oracle_trace(sentences, reference, budget_tokens)
        .into_iter()
        .map(|s| s.sentence_index)
        .collect();
    indices.sort_unstable();
    ExtractiveSummary {
        selected: indices.iter().map(|&i| sentences[i].clone()).collect(),
        budget_tokens,
    }
}
