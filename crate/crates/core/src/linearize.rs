//! Flatten argument graphs and sentence lists into summarizer input text.
//!
//! The graph variant walks the graph depth-first from the conversation root
//! over reversed edges (root → issues/claims → premises), joining the visit
//! order with an arrow. The filtered variant is plain concatenation with a
//! document marker. Both apply an optional token budget whose output is an
//! exact byte prefix of the untruncated text.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::arggraph::{ArgumentGraph, GraphError, NodeId};
use crate::corpus::word_count;
use crate::segment::Sentence;

/// Rendering of the root node.
pub const ROOT_TOKEN: &str = "CONVERSATION";
/// Rendering of an Issue node.
pub const ISSUE_TOKEN: &str = "ISSUE";
/// Joins parent and child in the depth-first walk.
pub const ARROW_SEPARATOR: &str = " → ";
/// Separates the root's subtrees; the root token is not repeated.
pub const SUBTREE_SEPARATOR: &str = " | ";
/// Marks a document boundary in the filtered and raw renderings.
pub const DOC_SEPARATOR: &str = "<doc>";

/// Text ready for a sequence-to-sequence consumer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearizedGraph {
    pub text: String,
    pub token_count: usize,
    pub truncated: bool,
}

impl LinearizedGraph {
    fn from_text(full: String, max_tokens: Option<usize>) -> LinearizedGraph {
        match max_tokens {
            Some(budget) => {
                let (text, truncated) = truncate_tokens(&full, budget);
                let token_count = word_count(&text);
                LinearizedGraph {
                    text,
                    token_count,
                    truncated,
                }
            }
            None => {
                let token_count = word_count(&full);
                LinearizedGraph {
                    text: full,
                    token_count,
                    truncated: false,
                }
            }
        }
    }
}

/// Cut `text` after its first `max_tokens` whitespace tokens.
///
/// Returns the exact byte prefix ending at the last kept token, and whether
/// anything was cut. Never splits inside a token.
pub fn truncate_tokens(text: &str, max_tokens: usize) -> (String, bool) {
    let mut count = 0usize;
    let mut end = 0usize;
    let mut in_token = false;
    for (offset, ch) in text.char_indices() {
        if ch.is_whitespace() {
            in_token = false;
        } else {
            if !in_token {
                count += 1;
                if count > max_tokens {
                    return (text[..end].to_string(), true);
                }
                in_token = true;
            }
            end = offset + ch.len_utf8();
        }
    }
    (text.to_string(), false)
}

/// Depth-first linearization of an argument graph.
///
/// Children of a node are its supporters (edges reversed), visited in
/// descending incoming-edge score; unscored edges count as 0. Ties order by
/// sentence ordinal — an Issue node uses its smallest member ordinal. The
/// visit sequence of each root subtree is joined with [`ARROW_SEPARATOR`];
/// subtrees are joined with [`SUBTREE_SEPARATOR`] after the single leading
/// root token.
pub fn linearize(
    graph: &ArgumentGraph,
    max_tokens: Option<usize>,
) -> Result<LinearizedGraph, GraphError> {
    graph.validate()?;

    // children[parent] = (order key, child)
    let mut children: HashMap<NodeId, Vec<(f64, usize, NodeId)>> = HashMap::new();
    for edge in &graph.edges {
        children
            .entry(edge.dst)
            .or_default()
            .push((edge.score.unwrap_or(0.0), sort_ordinal(graph, edge.src), edge.src));
    }
    for list in children.values_mut() {
        list.sort_by(|a, b| {
            b.0.partial_cmp(&a.0)
                .expect("edge scores are finite")
                .then(a.1.cmp(&b.1))
        });
    }

    let mut subtrees = Vec::new();
    if let Some(roots) = children.get(&NodeId::Root) {
        for &(_, _, child) in roots {
            let mut parts = Vec::new();
            visit(graph, &children, child, &mut parts);
            subtrees.push(parts.join(ARROW_SEPARATOR));
        }
    }
    let full = if subtrees.is_empty() {
        ROOT_TOKEN.to_string()
    } else {
        format!(
            "{ROOT_TOKEN}{ARROW_SEPARATOR}{}",
            subtrees.join(SUBTREE_SEPARATOR)
        )
    };
    Ok(LinearizedGraph::from_text(full, max_tokens))
}

fn visit(
    graph: &ArgumentGraph,
    children: &HashMap<NodeId, Vec<(f64, usize, NodeId)>>,
    node: NodeId,
    parts: &mut Vec<String>,
) {
    parts.push(match node {
        NodeId::INode(i) => graph.sentences[i].0.text.clone(),
        NodeId::Issue(_) => ISSUE_TOKEN.to_string(),
        NodeId::Root => ROOT_TOKEN.to_string(),
    });
    if let Some(kids) = children.get(&node) {
        for &(_, _, child) in kids {
            visit(graph, children, child, parts);
        }
    }
}

/// Tie-break ordinal: a sentence's global index; for an Issue node, the
/// smallest global index among its members.
fn sort_ordinal(graph: &ArgumentGraph, node: NodeId) -> usize {
    match node {
        NodeId::INode(i) => i,
        NodeId::Issue(k) => graph
            .edges
            .iter()
            .filter_map(|e| match (e.src, e.dst) {
                (NodeId::INode(i), NodeId::Issue(m)) if m == k => Some(i),
                _ => None,
            })
            .min()
            .unwrap_or(usize::MAX),
        NodeId::Root => usize::MAX,
    }
}

/// Render ordered sentences as plain text with [`DOC_SEPARATOR`] between
/// documents — the noise-filtered input variant.
pub fn render_filtered(sentences: &[Sentence], max_tokens: Option<usize>) -> LinearizedGraph {
    let mut pieces = Vec::with_capacity(sentences.len());
    let mut prev_doc: Option<usize> = None;
    for s in sentences {
        if let Some(prev) = prev_doc {
            if s.doc_index != prev {
                pieces.push(DOC_SEPARATOR.to_string());
            }
        }
        pieces.push(s.text.clone());
        prev_doc = Some(s.doc_index);
    }
    LinearizedGraph::from_text(pieces.join(" "), max_tokens)
}

/// Render whole post bodies with [`DOC_SEPARATOR`] between them — the raw
/// input variant.
pub fn render_raw(bodies: &[String], max_tokens: Option<usize>) -> LinearizedGraph {
    let joined = bodies.join(&format!(" {DOC_SEPARATOR} "));
    LinearizedGraph::from_text(joined, max_tokens)
}
