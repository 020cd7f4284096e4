//! End-to-end preparation of summarizer inputs.
//!
//! One conversation in, one [`LinearizedGraph`] out, for any of the three
//! input variants. Everything downstream of the scorer is pure, so with the
//! heuristic backend two runs produce byte-identical text.

use serde::{Deserialize, Serialize};

use crate::arggraph::{arg_filter, assemble, ArgumentGraph, GraphError};
use crate::corpus::Conversation;
use crate::linearize::{linearize, render_filtered, render_raw, LinearizedGraph};
use crate::scoring::{Scorer, ScoringError};
use crate::segment::{SegmentError, Segmenter};

/// Which input rendering to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    /// Post bodies joined with a document marker.
    Raw,
    /// Argumentative sentences only, in source order.
    ArgFiltered,
    /// Depth-first linearization of the argument graph.
    ArgGraph,
}

impl Variant {
    pub fn as_str(&self) -> &'static str {
        match self {
            Variant::Raw => "raw",
            Variant::ArgFiltered => "arg-filtered",
            Variant::ArgGraph => "arg-graph",
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = String;

    fn from_str(value: &str) -> Result<Self, Self::Err> {
        match value {
            "raw" => Ok(Variant::Raw),
            "arg-filtered" | "arg_filtered" => Ok(Variant::ArgFiltered),
            "arg-graph" | "arg_graph" => Ok(Variant::ArgGraph),
            other => Err(format!(
                "unknown variant {other:?} (expected raw, arg-filtered, or arg-graph)"
            )),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error("conversation {conv_id}: {source}")]
    Segment {
        conv_id: String,
        #[source]
        source: SegmentError,
    },
    #[error("conversation {conv_id}: {source}")]
    Scoring {
        conv_id: String,
        #[source]
        source: ScoringError,
    },
    #[error("conversation {conv_id}: {source}")]
    Graph {
        conv_id: String,
        #[source]
        source: GraphError,
    },
}

impl PipelineError {
    /// True when the failure came from the scorer backend rather than the
    /// data or the graph logic.
    pub fn is_scorer_error(&self) -> bool {
        matches!(self, PipelineError::Scoring { .. })
            | matches!(
                self,
                PipelineError::Graph {
                    source: GraphError::Scoring(_),
                    ..
                }
            )
    }
}

/// Build the argument graph of one conversation.
pub fn build_graph(
    conv: &Conversation,
    segmenter: &Segmenter,
    scorer: &dyn Scorer,
) -> Result<ArgumentGraph, PipelineError> {
    let conv_id = conv.conv_id.clone();
    let docs = segmenter
        .segment_conversation(conv)
        .map_err(|source| PipelineError::Segment {
            conv_id: conv_id.clone(),
            source,
        })?;
    let texts: Vec<&str> = docs
        .iter()
        .flatten()
        .map(|s| s.text.as_str())
        .collect();
    let roles = scorer
        .classify(&texts)
        .map_err(|source| PipelineError::Scoring {
            conv_id: conv_id.clone(),
            source,
        })?;
    assemble(&docs, &roles, scorer).map_err(|source| PipelineError::Graph { conv_id, source })
}

/// Produce the requested input variant for one conversation.
pub fn prepare(
    conv: &Conversation,
    variant: Variant,
    segmenter: &Segmenter,
    scorer: &dyn Scorer,
    max_tokens: Option<usize>,
) -> Result<LinearizedGraph, PipelineError> {
    match variant {
        Variant::Raw => {
            let bodies: Vec<String> = conv.posts.iter().map(|p| p.body.clone()).collect();
            Ok(render_raw(&bodies, max_tokens))
        }
        Variant::ArgFiltered => {
            let conv_id = conv.conv_id.clone();
            let docs = segmenter
                .segment_conversation(conv)
                .map_err(|source| PipelineError::Segment {
                    conv_id: conv_id.clone(),
                    source,
                })?;
            let texts: Vec<&str> = docs.iter().flatten().map(|s| s.text.as_str()).collect();
            let roles = scorer
                .classify(&texts)
                .map_err(|source| PipelineError::Scoring { conv_id, source })?;
            Ok(render_filtered(&arg_filter(&docs, &roles), max_tokens))
        }
        Variant::ArgGraph => {
            let graph = build_graph(conv, segmenter, scorer)?;
            linearize(&graph, max_tokens).map_err(|source| PipelineError::Graph {
                conv_id: conv.conv_id.clone(),
                source,
            })
        }
    }
}
