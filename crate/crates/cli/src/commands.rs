//! Subcommand implementations.
//!
//! Conversations are processed with a worker pool; outputs are collected in
//! input order, so results are byte-stable regardless of scheduling. All
//! JSONL goes out as UTF-8 with LF line endings and each record's keys in
//! sorted order.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use convograph_core::corpus::{
    check_eligibility, parse_corpus, write_corpus, Conversation, CorpusFormat, EligibilityRule,
};
use convograph_core::extractive::{
    extract_top, extractive_oracle, lexrank, textrank, ExtractiveSummary, DEFAULT_DAMPING,
    DEFAULT_SIMILARITY_THRESHOLD, DEFAULT_TOLERANCE,
};
use convograph_core::metrics::{
    aggregate_stats, conversation_stats, rouge_score, ConversationStats, CorpusStats, RougeScore,
};
use convograph_core::pipeline::{build_graph, prepare};
use convograph_core::scoring::scorer_from_config;
use convograph_core::segment::{Segmenter, Sentence};

use crate::config::PipelineConfig;
use crate::CliError;

/// Sidecar record of `ingest`: eligibility per conversation.
#[derive(Debug, Serialize)]
struct EligibilityRecord<'a> {
    conv_id: &'a str,
    eligible: bool,
    violated_rules: &'a [EligibilityRule],
}

/// Output record of `prepare`. Field order is the sorted key order.
#[derive(Debug, Serialize)]
struct PrepareRecord<'a> {
    conv_id: &'a str,
    text: &'a str,
    truncated: bool,
    variant: &'a str,
}

/// Output record of `baseline`.
#[derive(Debug, Serialize)]
struct BaselineRecord<'a> {
    conv_id: &'a str,
    method: &'a str,
    rouge: Option<RougeScore>,
    selected_indices: Vec<usize>,
    summary_text: String,
}

fn load_corpus(path: &Path) -> Result<Vec<Conversation>, CliError> {
    Ok(parse_corpus(path, CorpusFormat::Jsonl)?)
}

fn write_lines(path: &Path, lines: &[String]) -> Result<(), CliError> {
    let mut out = Vec::with_capacity(lines.iter().map(|l| l.len() + 1).sum());
    for line in lines {
        out.extend_from_slice(line.as_bytes());
        out.push(b'\n');
    }
    std::fs::write(path, out)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))
}

/// Parse and validate a corpus, re-serialize it normalized, and write the
/// eligibility report sidecar.
pub fn cmd_ingest(input: &Path, output: &Path, report: &Path) -> Result<IngestSummary, CliError> {
    let conversations = load_corpus(input)?;

    let mut corpus_bytes = Vec::new();
    write_corpus(&mut corpus_bytes, &conversations)
        .map_err(|e| CliError::Data(format!("cannot serialize corpus: {e}")))?;
    std::fs::write(output, corpus_bytes)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", output.display())))?;

    let reports: Vec<(String, convograph_core::corpus::EligibilityReport)> = conversations
        .par_iter()
        .map(|c| (c.conv_id.clone(), check_eligibility(c)))
        .collect();
    let lines: Vec<String> = reports
        .iter()
        .map(|(conv_id, rep)| {
            serde_json::to_string(&EligibilityRecord {
                conv_id,
                eligible: rep.eligible,
                violated_rules: &rep.violated_rules,
            })
            .expect("record serializes")
        })
        .collect();
    write_lines(report, &lines)?;

    Ok(IngestSummary {
        conversations: conversations.len(),
        eligible: reports.iter().filter(|(_, r)| r.eligible).count(),
    })
}

pub struct IngestSummary {
    pub conversations: usize,
    pub eligible: usize,
}

/// Render every conversation in the configured variant to JSONL.
pub fn cmd_prepare(input: &Path, output: &Path, cfg: &PipelineConfig) -> Result<usize, CliError> {
    let conversations = load_corpus(input)?;
    let scorer = scorer_from_config(&cfg.scorer)?;
    let segmenter = Segmenter::default();

    let lines: Vec<String> = conversations
        .par_iter()
        .map(|conv| {
            let rendered = prepare(
                conv,
                cfg.variant,
                &segmenter,
                scorer.as_ref(),
                Some(cfg.max_tokens),
            )?;
            Ok(serde_json::to_string(&PrepareRecord {
                conv_id: &conv.conv_id,
                text: &rendered.text,
                truncated: rendered.truncated,
                variant: cfg.variant.as_str(),
            })
            .expect("record serializes"))
        })
        .collect::<Result<_, CliError>>()?;

    write_lines(output, &lines)?;
    Ok(lines.len())
}

/// Which extractive baseline to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    Lexrank,
    Textrank,
    Oracle,
}

impl BaselineMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            BaselineMethod::Lexrank => "lexrank",
            BaselineMethod::Textrank => "textrank",
            BaselineMethod::Oracle => "oracle",
        }
    }
}

impl std::str::FromStr for BaselineMethod {
    type Err = String;

    fn from_str(value: &str) -> Result<Self, Self::Err> {
        match value {
            "lexrank" => Ok(BaselineMethod::Lexrank),
            "textrank" => Ok(BaselineMethod::Textrank),
            "oracle" => Ok(BaselineMethod::Oracle),
            other => Err(format!(
                "unknown method {other:?} (expected lexrank, textrank, or oracle)"
            )),
        }
    }
}

fn flat_sentences(conv: &Conversation) -> Result<Vec<Sentence>, CliError> {
    let segmenter = Segmenter::default();
    let docs = segmenter
        .segment_conversation(conv)
        .map_err(|e| CliError::Data(format!("conversation {}: {e}", conv.conv_id)))?;
    Ok(docs.into_iter().flatten().collect())
}

/// Run one extractive baseline over the corpus.
pub fn cmd_baseline(
    input: &Path,
    output: &Path,
    method: BaselineMethod,
    budget_tokens: usize,
) -> Result<usize, CliError> {
    let conversations = load_corpus(input)?;

    let lines: Vec<String> = conversations
        .par_iter()
        .map(|conv| {
            let sentences = flat_sentences(conv)?;
            let summary: ExtractiveSummary = match method {
                BaselineMethod::Lexrank => extract_top(
                    &lexrank(
                        &sentences,
                        DEFAULT_DAMPING,
                        DEFAULT_SIMILARITY_THRESHOLD,
                        DEFAULT_TOLERANCE,
                    ),
                    budget_tokens,
                ),
                BaselineMethod::Textrank => extract_top(
                    &textrank(&sentences, DEFAULT_DAMPING, DEFAULT_TOLERANCE),
                    budget_tokens,
                ),
                BaselineMethod::Oracle => {
                    let reference = conv.reference_summary.as_deref().ok_or_else(|| {
                        CliError::Data(format!(
                            "conversation {}: oracle requires a reference_summary",
                            conv.conv_id
                        ))
                    })?;
                    extractive_oracle(&sentences, reference, budget_tokens)
                }
            };

            let selected_indices: Vec<usize> = summary
                .selected
                .iter()
                .map(|s| {
                    sentences
                        .iter()
                        .position(|t| t.doc_index == s.doc_index && t.sent_index == s.sent_index)
                        .expect("selection comes from the sentence list")
                })
                .collect();
            let summary_text = summary.text();
            let rouge = conv
                .reference_summary
                .as_deref()
                .map(|reference| rouge_score(&summary_text, reference));

            Ok(serde_json::to_string(&BaselineRecord {
                conv_id: &conv.conv_id,
                method: method.as_str(),
                rouge,
                selected_indices,
                summary_text,
            })
            .expect("record serializes"))
        })
        .collect::<Result<_, CliError>>()?;

    write_lines(output, &lines)?;
    Ok(lines.len())
}

/// Stats report: per-domain and overall aggregates.
#[derive(Debug, Serialize)]
pub struct StatsReport {
    pub by_domain: std::collections::BTreeMap<String, CorpusStats>,
    pub overall: CorpusStats,
}

/// Compute the corpus statistics report.
pub fn cmd_stats(input: &Path, cfg: &PipelineConfig) -> Result<StatsReport, CliError> {
    let conversations = load_corpus(input)?;
    let per_conv: Vec<ConversationStats> = conversations
        .par_iter()
        .map(|c| conversation_stats(c, cfg.segments, cfg.budget_tokens))
        .collect();

    let mut by_domain: std::collections::BTreeMap<String, Vec<ConversationStats>> =
        std::collections::BTreeMap::new();
    for stats in &per_conv {
        by_domain
            .entry(stats.domain.clone())
            .or_default()
            .push(stats.clone());
    }

    Ok(StatsReport {
        by_domain: by_domain
            .into_iter()
            .map(|(domain, stats)| (domain, aggregate_stats(&stats)))
            .collect(),
        overall: aggregate_stats(&per_conv),
    })
}

/// Render a stats report as tab-separated rows, one per domain plus `all`.
pub fn stats_to_tsv(report: &StatsReport) -> String {
    fn opt(v: Option<f64>) -> String {
        v.map_or_else(|| "-".to_string(), |x| format!("{x:.3}"))
    }
    fn row(name: &str, s: &CorpusStats) -> String {
        let (uni, bi, tri) = s
            .novel_ngram_pct
            .map_or((None, None, None), |(u, b, t)| (Some(u), Some(b), Some(t)));
        let (r1, r2, rl) = s.oracle_rouge.map_or((None, None, None), |r| {
            (Some(r.r1.f1), Some(r.r2.f1), Some(r.rl.f1))
        });
        let bias = s.layout_bias.as_ref().map_or_else(
            || "-".to_string(),
            |b| {
                b.iter()
                    .map(|x| format!("{x:.3}"))
                    .collect::<Vec<_>>()
                    .join(",")
            },
        );
        format!(
            "{name}\t{}\t{:.1}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{bias}",
            s.examples,
            s.mean_input_tokens,
            opt(s.mean_summary_tokens),
            opt(uni),
            opt(bi),
            opt(tri),
            opt(r1),
            opt(r2),
            opt(rl),
            opt(s.inter_doc_similarity),
            s.redundancy,
        )
    }

    let mut out = String::from(
        "domain\texamples\tinput_tokens\tsummary_tokens\tnovel_uni_pct\tnovel_bi_pct\t\
         novel_tri_pct\toracle_r1\toracle_r2\toracle_rl\tinter_doc_similarity\tredundancy\t\
         layout_bias\n",
    );
    for (domain, stats) in &report.by_domain {
        out.push_str(&row(domain, stats));
        out.push('\n');
    }
    out.push_str(&row("all", &report.overall));
    out.push('\n');
    out
}

/// Graph output format.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = String;

    fn from_str(value: &str) -> Result<Self, Self::Err> {
        match value {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(format!("unknown graph format {other:?} (expected dot or json)")),
        }
    }
}

/// Emit one conversation's argument graph for inspection.
pub fn cmd_graph(
    input: &Path,
    conv_id: &str,
    format: GraphFormat,
    cfg: &PipelineConfig,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let conversations = load_corpus(input)?;
    let conv = conversations
        .iter()
        .find(|c| c.conv_id == conv_id)
        .ok_or_else(|| CliError::Data(format!("no conversation with conv_id {conv_id:?}")))?;

    let scorer = scorer_from_config(&cfg.scorer)?;
    let graph = build_graph(conv, &Segmenter::default(), scorer.as_ref())?;
    let rendered = match format {
        GraphFormat::Dot => graph.to_dot(),
        GraphFormat::Json => {
            let mut text = serde_json::to_string_pretty(&graph.to_json())
                .expect("graph JSON serializes");
            text.push('\n');
            text
        }
    };
    out.write_all(rendered.as_bytes())
        .map_err(|e| CliError::Data(format!("cannot write graph: {e}")))?;
    Ok(())
}
