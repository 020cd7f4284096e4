//! ROUGE-1/2/L, novel n-gram rates, and multi-document corpus statistics.
//!
//! All metrics tokenize identically (see [`crate::text::tokenize`]):
//! lowercase, tokens are maximal alphanumeric runs. ROUGE applies no
//! stemming. The multi-document statistics use the sentence as the semantic
//! unit, represented by its set of content-word unigrams; all scales run in
//! `[0, 1]` with 0 meaning no overlap (similarity) or every unit unique
//! (redundancy).

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{word_count, Conversation};
use crate::extractive::{extractive_oracle, DEFAULT_BUDGET_TOKENS};
use crate::segment::segment_post;
use crate::text;

/// Precision / recall / F1 triple; F1 is the harmonic mean, 0 when both
/// components are 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Prf {
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Prf {
            precision,
            recall,
            f1,
        }
    }

    pub const ZERO: Prf = Prf {
        precision: 0.0,
        recall: 0.0,
        f1: 0.0,
    };
}

/// ROUGE-1, ROUGE-2, and ROUGE-L for one candidate/reference pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RougeScore {
    pub r1: Prf,
    pub r2: Prf,
    pub rl: Prf,
}

/// Clipped n-gram overlap ROUGE.
///
/// `overlap = Σ_g min(count_cand(g), count_ref(g))`; precision divides by
/// the candidate's n-gram total, recall by the reference's. Empty
/// denominators yield 0.
pub fn rouge_n(candidate: &str, reference: &str, n: usize) -> Prf {
    let cand_grams = text::ngrams(&text::tokenize(candidate), n);
    let ref_grams = text::ngrams(&text::tokenize(reference), n);
    if cand_grams.is_empty() || ref_grams.is_empty() {
        return Prf::ZERO;
    }

    let mut ref_counts: HashMap<&str, usize> = HashMap::new();
    for g in &ref_grams {
        *ref_counts.entry(g.as_str()).or_insert(0) += 1;
    }
    let mut overlap = 0usize;
    for g in &cand_grams {
        if let Some(count) = ref_counts.get_mut(g.as_str()) {
            if *count > 0 {
                *count -= 1;
                overlap += 1;
            }
        }
    }
    Prf::new(
        overlap as f64 / cand_grams.len() as f64,
        overlap as f64 / ref_grams.len() as f64,
    )
}

/// Longest-common-subsequence ROUGE over tokens.
pub fn rouge_l(candidate: &str, reference: &str) -> Prf {
    let cand = text::tokenize(candidate);
    let reference = text::tokenize(reference);
    if cand.is_empty() || reference.is_empty() {
        return Prf::ZERO;
    }
    let lcs = lcs_length(&cand, &reference) as f64;
    Prf::new(lcs / cand.len() as f64, lcs / reference.len() as f64)
}

fn lcs_length(a: &[String], b: &[String]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for item_a in a {
        let mut diagonal = 0usize;
        for (j, item_b) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if item_a == item_b {
                diagonal + 1
            } else {
                row[j + 1].max(row[j])
            };
            diagonal = up;
        }
    }
    row[b.len()]
}

/// ROUGE-1/2/L in one call.
pub fn rouge_score(candidate: &str, reference: &str) -> RougeScore {
    RougeScore {
        r1: rouge_n(candidate, reference, 1),
        r2: rouge_n(candidate, reference, 2),
        rl: rouge_l(candidate, reference),
    }
}

/// Percentage of summary n-gram *types* absent from the source's types.
///
/// 0 when the summary has no n-grams of this order.
pub fn novel_ngrams(summary: &str, source: &str, n: usize) -> f64 {
    let summary_types: HashSet<String> =
        text::ngrams(&text::tokenize(summary), n).into_iter().collect();
    if summary_types.is_empty() {
        return 0.0;
    }
    let source_types: HashSet<String> =
        text::ngrams(&text::tokenize(source), n).into_iter().collect();
    let novel = summary_types
        .iter()
        .filter(|g| !source_types.contains(*g))
        .count();
    100.0 * novel as f64 / summary_types.len() as f64
}

/// Words in the model input: title, context, and every post body.
pub fn input_length(conv: &Conversation) -> usize {
    let meta = conv.title.as_deref().map_or(0, word_count)
        + conv.context.as_deref().map_or(0, word_count);
    meta + conv.posts.iter().map(|p| word_count(&p.body)).sum::<usize>()
}

/// Multi-document characteristics of one conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MdsStats {
    /// Mean pairwise cross-document unit alignment in `[0, 1]`; absent for
    /// single-document conversations.
    pub inter_doc_similarity: Option<f64>,
    /// `1 − distinct_units / total_units` under near-duplicate clustering.
    pub redundancy: f64,
    /// Per input segment, mean ROUGE-1 recall against the reference.
    pub layout_bias: Vec<f64>,
}

/// Near-duplicate units cluster together at this overlap F1.
pub const NEAR_DUPLICATE_F1: f64 = 0.8;
/// Default number of layout segments.
pub const DEFAULT_SEGMENTS: usize = 4;

/// Content-word unigram sets of each document's sentences.
fn document_units(conv: &Conversation) -> Vec<Vec<HashSet<String>>> {
    conv.posts
        .iter()
        .map(|p| {
            segment_post(&p.body)
                .iter()
                .map(|s| text::content_word_set(&s.text))
                .collect()
        })
        .collect()
}

/// Mean pairwise cross-document alignment of semantic units.
///
/// For a document pair, each unit of one side is matched to its best
/// overlap-F1 counterpart on the other; the two directional means are
/// averaged. `None` with fewer than two documents.
pub fn inter_document_similarity(units: &[Vec<HashSet<String>>]) -> Option<f64> {
    if units.len() < 2 {
        return None;
    }
    let mut pair_scores = Vec::new();
    for a in 0..units.len() {
        for b in (a + 1)..units.len() {
            pair_scores.push(
                (directional_alignment(&units[a], &units[b])
                    + directional_alignment(&units[b], &units[a]))
                    / 2.0,
            );
        }
    }
    Some(mean(&pair_scores))
}

fn directional_alignment(from: &[HashSet<String>], to: &[HashSet<String>]) -> f64 {
    if from.is_empty() {
        return 0.0;
    }
    let best: Vec<f64> = from
        .iter()
        .map(|u| {
            to.iter()
                .map(|v| text::set_f1(u, v))
                .fold(0.0, f64::max)
        })
        .collect();
    mean(&best)
}

/// `1 − clusters/units`: 0 when every unit is unique, approaching 1 as
/// units repeat. Units cluster when their overlap F1 reaches
/// [`NEAR_DUPLICATE_F1`].
pub fn redundancy(units: &[Vec<HashSet<String>>]) -> f64 {
    let flat: Vec<&HashSet<String>> = units.iter().flatten().collect();
    let n = flat.len();
    if n == 0 {
        return 0.0;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, x: usize) -> usize {
        if parent[x] != x {
            let up = parent[x];
            let root = find(parent, up);
            parent[x] = root;
        }
        parent[x]
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if text::set_f1(flat[i], flat[j]) >= NEAR_DUPLICATE_F1 {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    let (lo, hi) = if ri < rj { (ri, rj) } else { (rj, ri) };
                    parent[hi] = lo;
                }
            }
        }
    }
    let clusters: HashSet<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    1.0 - clusters.len() as f64 / n as f64
}

/// Mean ROUGE-1 recall of each document segment against the reference.
///
/// Every document's tokens are split into `segments` equal contiguous
/// spans; entry `k` averages over documents the recall of span `k`.
pub fn layout_bias(conv: &Conversation, reference: &str, segments: usize) -> Vec<f64> {
    let mut per_segment = vec![Vec::new(); segments];
    for post in &conv.posts {
        let tokens = text::tokenize(&post.body);
        for k in 0..segments {
            let start = k * tokens.len() / segments;
            let end = (k + 1) * tokens.len() / segments;
            let span = tokens[start..end].join(" ");
            per_segment[k].push(rouge_n(&span, reference, 1).recall);
        }
    }
    per_segment.into_iter().map(|v| mean(&v)).collect()
}

/// The three multi-document statistics for one conversation.
pub fn mds_stats(conv: &Conversation, reference: &str, segments: usize) -> MdsStats {
    let units = document_units(conv);
    MdsStats {
        inter_doc_similarity: inter_document_similarity(&units),
        redundancy: redundancy(&units),
        layout_bias: layout_bias(conv, reference, segments),
    }
}

/// Everything the stats report needs from one conversation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConversationStats {
    pub conv_id: String,
    pub domain: String,
    pub input_tokens: usize,
    pub summary_tokens: Option<usize>,
    /// Novel (uni, bi, tri)-gram percentages of the reference against the
    /// input; absent without a reference summary.
    pub novel_ngram_pct: Option<(f64, f64, f64)>,
    pub oracle_rouge: Option<RougeScore>,
    pub inter_doc_similarity: Option<f64>,
    pub redundancy: f64,
    pub layout_bias: Option<Vec<f64>>,
}

/// Compute per-conversation statistics; reference-dependent entries are
/// `None` when the conversation carries no reference summary.
pub fn conversation_stats(
    conv: &Conversation,
    segments: usize,
    oracle_budget: usize,
) -> ConversationStats {
    let units = document_units(conv);
    let source_text = input_text(conv);

    let reference = conv.reference_summary.as_deref();
    let (novel, oracle, bias, summary_tokens) = match reference {
        Some(summary) => {
            let novel = (
                novel_ngrams(summary, &source_text, 1),
                novel_ngrams(summary, &source_text, 2),
                novel_ngrams(summary, &source_text, 3),
            );
            let sentences: Vec<_> = conv
                .posts
                .iter()
                .enumerate()
                .flat_map(|(doc, p)| {
                    let mut sents = segment_post(&p.body);
                    for s in &mut sents {
                        s.doc_index = doc;
                    }
                    sents
                })
                .collect();
            let selection = extractive_oracle(&sentences, summary, oracle_budget);
            let oracle = rouge_score(&selection.text(), summary);
            let bias = layout_bias(conv, summary, segments);
            (
                Some(novel),
                Some(oracle),
                Some(bias),
                Some(word_count(summary)),
            )
        }
        None => (None, None, None, None),
    };

    ConversationStats {
        conv_id: conv.conv_id.clone(),
        domain: conv.domain.to_string(),
        input_tokens: input_length(conv),
        summary_tokens,
        novel_ngram_pct: novel,
        oracle_rouge: oracle,
        inter_doc_similarity: inter_document_similarity(&units),
        redundancy: redundancy(&units),
        layout_bias: bias,
    }
}

fn input_text(conv: &Conversation) -> String {
    let mut parts = Vec::new();
    if let Some(t) = &conv.title {
        parts.push(t.clone());
    }
    if let Some(c) = &conv.context {
        parts.push(c.clone());
    }
    parts.extend(conv.posts.iter().map(|p| p.body.clone()));
    parts.join(" ")
}

/// Corpus-level aggregate: means of the per-conversation values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub examples: usize,
    pub mean_input_tokens: f64,
    pub mean_summary_tokens: Option<f64>,
    pub novel_ngram_pct: Option<(f64, f64, f64)>,
    pub oracle_rouge: Option<RougeScore>,
    pub inter_doc_similarity: Option<f64>,
    pub redundancy: f64,
    pub layout_bias: Option<Vec<f64>>,
}

/// Average per-conversation statistics. Reference-dependent fields average
/// over the conversations that have references; `inter_doc_similarity` over
/// multi-document conversations.
pub fn aggregate_stats(stats: &[ConversationStats]) -> CorpusStats {
    let examples = stats.len();
    let mean_input_tokens = mean(
        &stats
            .iter()
            .map(|s| s.input_tokens as f64)
            .collect::<Vec<_>>(),
    );

    let summary_lengths: Vec<f64> = stats
        .iter()
        .filter_map(|s| s.summary_tokens.map(|t| t as f64))
        .collect();
    let novel: Vec<(f64, f64, f64)> = stats.iter().filter_map(|s| s.novel_ngram_pct).collect();
    let oracle: Vec<RougeScore> = stats.iter().filter_map(|s| s.oracle_rouge).collect();
    let inter: Vec<f64> = stats.iter().filter_map(|s| s.inter_doc_similarity).collect();
    let redundancy_mean = mean(&stats.iter().map(|s| s.redundancy).collect::<Vec<_>>());
    let biases: Vec<&Vec<f64>> = stats.iter().filter_map(|s| s.layout_bias.as_ref()).collect();

    CorpusStats {
        examples,
        mean_input_tokens,
        mean_summary_tokens: non_empty(&summary_lengths).map(mean),
        novel_ngram_pct: if novel.is_empty() {
            None
        } else {
            Some((
                mean(&novel.iter().map(|n| n.0).collect::<Vec<_>>()),
                mean(&novel.iter().map(|n| n.1).collect::<Vec<_>>()),
                mean(&novel.iter().map(|n| n.2).collect::<Vec<_>>()),
            ))
        },
        oracle_rouge: if oracle.is_empty() {
            None
        } else {
            Some(RougeScore {
                r1: mean_prf(oracle.iter().map(|r| r.r1)),
                r2: mean_prf(oracle.iter().map(|r| r.r2)),
                rl: mean_prf(oracle.iter().map(|r| r.rl)),
            })
        },
        inter_doc_similarity: non_empty(&inter).map(mean),
        redundancy: redundancy_mean,
        layout_bias: if biases.is_empty() {
            None
        } else {
            let segments = biases[0].len();
            Some(
                (0..segments)
                    .map(|k| mean(&biases.iter().map(|b| b[k]).collect::<Vec<_>>()))
                    .collect(),
            )
        },
    }
}

fn non_empty(values: &[f64]) -> Option<&[f64]> {
    if values.is_empty() {
        None
    } else {
        Some(values)
    }
}

fn mean<V: AsRef<[f64]>>(values: V) -> f64 {
    let values = values.as_ref();
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn mean_prf(values: impl Iterator<Item = Prf> + Clone) -> Prf {
    let p: Vec<f64> = values.clone().map(|v| v.precision).collect();
    let r: Vec<f64> = values.clone().map(|v| v.recall).collect();
    let f: Vec<f64> = values.map(|v| v.f1).collect();
    Prf {
        precision: mean(&p),
        recall: mean(&r),
        f1: mean(&f),
    }
}

/// Oracle budget used by the stats report.
pub const DEFAULT_ORACLE_BUDGET: usize = DEFAULT_BUDGET_TOKENS;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Domain, Post, Role};

    #[test]
    fn rouge_identical_is_perfect() {
        let r = rouge_score("the cat sat", "the cat sat");
        for prf in [r.r1, r.r2, r.rl] {
            assert_eq!(prf.precision, 1.0);
            assert_eq!(prf.recall, 1.0);
            assert_eq!(prf.f1, 1.0);
        }
    }

    #[test]
    fn rouge_disjoint_is_zero() {
        let r = rouge_score("alpha beta", "gamma delta");
        for prf in [r.r1, r.r2, r.rl] {
            assert_eq!(prf, Prf::ZERO);
        }
    }

    #[test]
    fn rouge1_partial_overlap() {
        let prf = rouge_n("the cat sat", "the cat ran", 1);
        assert!((prf.precision - 2.0 / 3.0).abs() < 1e-12);
        assert!((prf.recall - 2.0 / 3.0).abs() < 1e-12);
        assert!((prf.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn rouge_clips_repeated_ngrams() {
        // "a a a" vs "a": only one unigram match counts.
        let prf = rouge_n("a a a", "a", 1);
        assert!((prf.precision - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(prf.recall, 1.0);
    }

    #[test]
    fn rouge_l_counts_subsequence() {
        let prf = rouge_l("a b c d", "a c b d");
        assert!((prf.precision - 0.75).abs() < 1e-12);
        assert!((prf.recall - 0.75).abs() < 1e-12);
    }

    #[test]
    fn rouge_empty_candidate_is_zero() {
        assert_eq!(rouge_l("", "a b"), Prf::ZERO);
        assert_eq!(rouge_n("", "a b", 1), Prf::ZERO);
        assert_eq!(rouge_n("a b", "", 2), Prf::ZERO);
    }

    #[test]
    fn novel_ngram_percentages() {
        assert_eq!(novel_ngrams("a b", "x a b y", 1), 0.0);
        assert_eq!(novel_ngrams("p q", "x y z", 1), 100.0);
        let pct = novel_ngrams("a b c", "a b", 1);
        assert!((pct - 100.0 / 3.0).abs() < 1e-9);
        assert_eq!(novel_ngrams("", "a b", 1), 0.0);
    }

    fn post(doc: usize, body: &str) -> Post {
        Post {
            post_id: format!("p{doc}"),
            author: None,
            score: None,
            role: Role::Comment,
            body: body.to_string(),
            parent_id: None,
            timestamp: None,
        }
    }

    fn conv(bodies: &[&str], reference: Option<&str>) -> Conversation {
        Conversation {
            conv_id: "c".into(),
            domain: Domain::Generic,
            title: None,
            context: None,
            tags: Vec::new(),
            posts: bodies.iter().enumerate().map(|(i, b)| post(i, b)).collect(),
            reference_summary: reference.map(str::to_string),
        }
    }

    #[test]
    fn input_length_includes_metadata() {
        let mut c = conv(&["one two three four five six seven eight nine ten"], None);
        c.title = Some("a five word title here".into());
        assert_eq!(input_length(&c), 15);
        let plain = conv(&["one two three four five", "six seven eight nine ten"], None);
        assert_eq!(input_length(&plain), 10);
    }

    #[test]
    fn identical_documents_maximize_similarity() {
        let c = conv(&["the solar panel works well", "the solar panel works well"], None);
        let units = document_units(&c);
        let sim = inter_document_similarity(&units).unwrap();
        assert!((sim - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_document_similarity_is_absent() {
        let c = conv(&["only one document here"], None);
        let units = document_units(&c);
        assert!(inter_document_similarity(&units).is_none());
    }

    #[test]
    fn disjoint_units_have_zero_redundancy() {
        let c = conv(&["alpha beta gamma. delta epsilon zeta.", "eta theta iota."], None);
        let units = document_units(&c);
        assert_eq!(redundancy(&units), 0.0);
    }

    #[test]
    fn repeated_units_raise_redundancy() {
        let c = conv(
            &["solar panels save money.", "solar panels save money."],
            None,
        );
        let units = document_units(&c);
        assert!((redundancy(&units) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn layout_bias_is_invariant_under_reference_permutation() {
        // ROUGE-1 recall depends on the reference multiset, not its order.
        let c = conv(
            &["alpha beta gamma delta epsilon zeta eta theta", "iota kappa lambda mu"],
            None,
        );
        let a = layout_bias(&c, "beta theta kappa gamma", 4);
        let b = layout_bias(&c, "kappa gamma beta theta", 4);
        assert_eq!(a, b);
        assert!(a.iter().all(|x| (0.0..=1.0).contains(x)));
    }

    #[test]
    fn layout_bias_detects_leading_copy() {
        // The reference copies the first quarter of the single document.
        let body = "alpha beta gamma delta one two three four five six seven eight \
                    nine ten eleven twelve";
        let c = conv(&[body], Some("alpha beta gamma delta"));
        let bias = layout_bias(&c, "alpha beta gamma delta", 4);
        assert_eq!(bias.len(), 4);
        assert!((bias[0] - 1.0).abs() < 1e-12, "bias = {bias:?}");
        for b in &bias[1..] {
            assert!(*b < 1.0);
        }
    }

    #[test]
    fn conversation_stats_without_reference_skips_reference_fields() {
        let c = conv(&["some words here", "other words there"], None);
        let stats = conversation_stats(&c, 4, 90);
        assert!(stats.novel_ngram_pct.is_none());
        assert!(stats.oracle_rouge.is_none());
        assert!(stats.layout_bias.is_none());
        assert!(stats.summary_tokens.is_none());
        assert!(stats.inter_doc_similarity.is_some());
    }

    #[test]
    fn aggregate_means_per_conversation_values() {
        let a = conversation_stats(
            &conv(&["solar power is cheap now", "wind is also cheap"], Some("renewables got cheap")),
            4,
            90,
        );
        let b = conversation_stats(
            &conv(&["cats sleep all day long", "dogs bark at night"], Some("pets behave differently")),
            4,
            90,
        );
        let agg = aggregate_stats(&[a.clone(), b.clone()]);
        assert_eq!(agg.examples, 2);
        let expected_input = (a.input_tokens + b.input_tokens) as f64 / 2.0;
        assert!((agg.mean_input_tokens - expected_input).abs() < 1e-12);
        let expected_redundancy = (a.redundancy + b.redundancy) / 2.0;
        assert!((agg.redundancy - expected_redundancy).abs() < 1e-12);
        assert!(agg.novel_ngram_pct.is_some());
        assert!(agg.layout_bias.as_ref().unwrap().len() == 4);
    }
}
