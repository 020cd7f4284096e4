//! Toolkit for turning threaded online conversations into argument graphs
//! and summarizer-ready inputs.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`corpus`] — ingest conversation threads from JSONL and apply
//!    eligibility filters (post counts, length bounds, community rating).
//! 2. [`segment`] — split post bodies into sentence units with stable
//!    `(doc_index, sent_index)` addressing.
//! 3. [`scoring`] — argument-role classification and entailment scoring
//!    behind a pluggable [`scoring::Scorer`] contract, with a remote HTTP
//!    backend and a deterministic lexical heuristic backend.
//! 4. [`arggraph`] — build the argument graph: per-document premise→claim
//!    support edges, a cross-document claim forest, Issue nodes grouping
//!    contradicting viewpoints, and a conversation root.
//! 5. [`linearize`] — flatten a graph (or a filtered sentence list) into the
//!    text sequence a sequence-to-sequence summarizer consumes.
//! 6. [`extractive`] — LexRank/TextRank baselines and a greedy extractive
//!    oracle.
//! 7. [`metrics`] — ROUGE-1/2/L, novel n-gram rates, and multi-document
//!    corpus statistics.
//!
//! [`pipeline`] wires the stages together for the three input variants
//! (`raw`, `arg-filtered`, `arg-graph`).

pub mod arggraph;
pub mod corpus;
pub mod extractive;
pub mod linearize;
pub mod metrics;
pub mod pipeline;
pub mod scoring;
pub mod segment;
pub mod text;
