//! Argument graph construction.
//!
//! A conversation becomes a directed acyclic graph whose information nodes
//! (I-nodes) are its claim and premise sentences. Construction runs in three
//! layers:
//!
//! 1. [`build_doc_graph`] — within one post, each premise gets a support
//!    edge to the claim it most entails (strictly above
//!    [`SUPPORT_THRESHOLD`]), falling back to the closest claim before it in
//!    the text. A post whose argumentative sentences are all premises has
//!    its first argumentative sentence promoted to claim.
//! 2. [`build_claim_forest`] — across posts, candidate claim→claim support
//!    edges (both directions, entailment above the same threshold) are added
//!    greedily by descending score while no cycle forms and each claim keeps
//!    at most one parent.
//! 3. [`build_issue_layer`] — claims left without a parent are the
//!    conversation's viewpoints. Viewpoints that contradict each other
//!    (either direction above [`CONTRADICTION_THRESHOLD`]) are grouped into
//!    connected components, each realized as one Issue node.
//!
//! [`assemble`] composes the layers and links every Issue node and every
//! remaining parentless claim to the conversation root.
//!
//! Edges point upward, child to parent: a premise points at the claim it
//! supports, a supporting claim at the supported one, members at their Issue
//! node, and top-level nodes at the root.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde_json::json;

use crate::scoring::{ArgLabel, ArgRole, Scorer, ScoringError};
use crate::segment::Sentence;

/// A premise→claim or claim→claim support edge needs entailment strictly
/// above this.
pub const SUPPORT_THRESHOLD: f64 = 0.33;

/// Two viewpoints join an Issue when contradiction in either direction is
/// strictly above this.
pub const CONTRADICTION_THRESHOLD: f64 = 0.33;

/// Node address within one graph: `(kind, index)` is unique.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    /// Information node holding the sentence with this global ordinal.
    INode(usize),
    /// Issue node with this ordinal.
    Issue(usize),
    /// The conversation root.
    Root,
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::INode(i) => write!(f, "i{i}"),
            NodeId::Issue(i) => write!(f, "issue{i}"),
            NodeId::Root => f.write_str("root"),
        }
    }
}

/// Typed edge. `score` is present exactly on support edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub src: NodeId,
    pub dst: NodeId,
    pub kind: EdgeKind,
    pub score: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    Support,
    IssueMember,
    RootLink,
}

impl EdgeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EdgeKind::Support => "support",
            EdgeKind::IssueMember => "issue_member",
            EdgeKind::RootLink => "root_link",
        }
    }
}

impl Edge {
    fn support(src: usize, dst: usize, score: f64) -> Edge {
        Edge {
            src: NodeId::INode(src),
            dst: NodeId::INode(dst),
            kind: EdgeKind::Support,
            score: Some(score),
        }
    }

    fn issue_member(claim: usize, issue: usize) -> Edge {
        Edge {
            src: NodeId::INode(claim),
            dst: NodeId::Issue(issue),
            kind: EdgeKind::IssueMember,
            score: None,
        }
    }

    fn root_link(src: NodeId) -> Edge {
        Edge {
            src,
            dst: NodeId::Root,
            kind: EdgeKind::RootLink,
            score: None,
        }
    }
}

/// The assembled argument graph of one conversation.
///
/// `sentences` keeps every sentence in global `(doc_index, sent_index)`
/// order, including non-argumentative ones — those participate in no edge.
/// Roles are the effective ones: a sentence promoted to claim by the
/// first-sentence rule carries confidence `[1.0, 0.0, 0.0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArgumentGraph {
    pub sentences: Vec<(Sentence, ArgRole)>,
    pub edges: Vec<Edge>,
    pub issue_count: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error("role list has {roles} entries for {sentences} sentences")]
    RoleCountMismatch { sentences: usize, roles: usize },
    #[error("graph invariant violated: {0}")]
    InvariantViolation(String),
}

/// The role value assigned by the first-sentence claim promotion rule.
fn promoted_claim() -> ArgRole {
    ArgRole::from_probs([1.0, 0.0, 0.0]).expect("promotion triple is valid")
}

/// Build within-post support edges for one document.
///
/// `doc` holds the post's sentences with their roles, ordered; global node
/// indices start at `base_index`. When no sentence is labeled claim but
/// premises exist, the first argumentative sentence is relabeled claim in
/// place. Each premise is scored (as NLI premise) against every claim (as
/// hypothesis); the best-entailed claim above [`SUPPORT_THRESHOLD`] wins,
/// ties going to the closest claim in the text and then the earliest. Below
/// the threshold the premise attaches to the nearest preceding claim, or the
/// nearest following one when none precedes; the edge still records the
/// entailment score of the chosen pair.
pub fn build_doc_graph(
    doc: &mut [(Sentence, ArgRole)],
    base_index: usize,
    scorer: &dyn Scorer,
) -> Result<Vec<Edge>, GraphError> {
    let has_claim = doc.iter().any(|(_, r)| r.label == ArgLabel::Claim);
    if !has_claim {
        if let Some(first_arg) = doc
            .iter()
            .position(|(_, r)| r.label == ArgLabel::Premise)
        {
            doc[first_arg].1 = promoted_claim();
        }
    }

    let claims: Vec<usize> = doc
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| r.label == ArgLabel::Claim)
        .map(|(i, _)| i)
        .collect();
    let premises: Vec<usize> = doc
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| r.label == ArgLabel::Premise)
        .map(|(i, _)| i)
        .collect();
    if premises.is_empty() || claims.is_empty() {
        return Ok(Vec::new());
    }

    let mut pairs = Vec::with_capacity(premises.len() * claims.len());
    for &p in &premises {
        for &c in &claims {
            pairs.push((doc[p].0.text.as_str(), doc[c].0.text.as_str()));
        }
    }
    let triples = scorer.score_pairs(&pairs)?;

    let mut edges = Vec::with_capacity(premises.len());
    for (pi, &p) in premises.iter().enumerate() {
        let entail_for = |ci: usize| triples[pi * claims.len() + ci].entail;

        // Argmax with ties broken by text distance, then position.
        let mut best = 0usize;
        for ci in 1..claims.len() {
            let (s, b) = (entail_for(ci), entail_for(best));
            let (d_new, d_best) = (
                claims[ci].abs_diff(p),
                claims[best].abs_diff(p),
            );
            if s > b || (s == b && d_new < d_best) {
                best = ci;
            }
        }

        let target = if entail_for(best) > SUPPORT_THRESHOLD {
            best
        } else {
            // Closest preceding claim, else closest following.
            claims
                .iter()
                .enumerate()
                .rev()
                .find(|&(_, &c)| c < p)
                .map(|(ci, _)| ci)
                .or_else(|| claims.iter().enumerate().find(|&(_, &c)| c > p).map(|(ci, _)| ci))
                .unwrap_or(best)
        };
        edges.push(Edge::support(
            base_index + p,
            base_index + claims[target],
            entail_for(target),
        ));
    }
    Ok(edges)
}

/// Greedily add cross-document claim→claim support edges.
///
/// `claims` lists `(global_index, text)` for every claim in the
/// conversation, ascending. All ordered pairs are scored; pairs entailing
/// strictly above [`SUPPORT_THRESHOLD`] become candidates, taken in
/// descending score (ties by source then target index). A candidate is kept
/// only if the source claim has no parent yet and no directed cycle forms.
pub fn build_claim_forest(
    claims: &[(usize, &str)],
    scorer: &dyn Scorer,
) -> Result<Vec<Edge>, GraphError> {
    if claims.len() < 2 {
        return Ok(Vec::new());
    }

    let mut pairs = Vec::with_capacity(claims.len() * (claims.len() - 1));
    let mut indexed = Vec::with_capacity(pairs.capacity());
    for (i, &(_, src_text)) in claims.iter().enumerate() {
        for (j, &(_, dst_text)) in claims.iter().enumerate() {
            if i != j {
                pairs.push((src_text, dst_text));
                indexed.push((i, j));
            }
        }
    }
    let triples = scorer.score_pairs(&pairs)?;

    let mut candidates: Vec<(f64, usize, usize)> = indexed
        .iter()
        .zip(&triples)
        .filter(|(_, t)| t.entail > SUPPORT_THRESHOLD)
        .map(|(&(i, j), t)| (t.entail, claims[i].0, claims[j].0))
        .collect();
    candidates.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .expect("entail scores are finite")
            .then(a.1.cmp(&b.1))
            .then(a.2.cmp(&b.2))
    });

    let mut parent: HashMap<usize, usize> = HashMap::new();
    let mut edges = Vec::new();
    for (score, src, dst) in candidates {
        if parent.contains_key(&src) {
            continue;
        }
        if reaches(&parent, dst, src) {
            continue; // would close a cycle
        }
        parent.insert(src, dst);
        edges.push(Edge::support(src, dst, score));
    }
    Ok(edges)
}

/// Walk parent links from `from`; true if `target` is reachable.
fn reaches(parent: &HashMap<usize, usize>, from: usize, target: usize) -> bool {
    let mut node = from;
    loop {
        if node == target {
            return true;
        }
        match parent.get(&node) {
            Some(&next) => node = next,
            None => return false,
        }
    }
}

/// Group contradicting parentless claims under Issue nodes.
///
/// Both directions of every pair are scored; a contradiction link exists
/// when either direction is strictly above [`CONTRADICTION_THRESHOLD`].
/// Each connected component of at least two claims becomes one Issue node
/// (ordered by smallest member index), and every member gets an
/// `issue_member` edge to it.
pub fn build_issue_layer(
    parentless_claims: &[(usize, &str)],
    scorer: &dyn Scorer,
) -> Result<(Vec<Edge>, usize), GraphError> {
    let n = parentless_claims.len();
    if n < 2 {
        return Ok((Vec::new(), 0));
    }

    let mut pairs = Vec::with_capacity(n * (n - 1));
    let mut indexed = Vec::with_capacity(pairs.capacity());
    for i in 0..n {
        for j in 0..n {
            if i != j {
                pairs.push((parentless_claims[i].1, parentless_claims[j].1));
                indexed.push((i, j));
            }
        }
    }
    let triples = scorer.score_pairs(&pairs)?;

    // A pair is linked when the max over both directions clears the
    // threshold; uniting on either direction separately is equivalent.
    let mut uf = UnionFind::new(n);
    for (&(i, j), t) in indexed.iter().zip(&triples) {
        if t.contradict > CONTRADICTION_THRESHOLD {
            uf.union(i, j);
        }
    }

    // Components of size >= 2, ordered by smallest member.
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for i in 0..n {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let mut components: Vec<Vec<usize>> = members
        .into_values()
        .filter(|m| m.len() >= 2)
        .collect();
    components.sort_by_key(|m| parentless_claims[m[0]].0);

    let mut edges = Vec::new();
    for (issue_index, component) in components.iter().enumerate() {
        for &member in component {
            edges.push(Edge::issue_member(parentless_claims[member].0, issue_index));
        }
    }
    Ok((edges, components.len()))
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Attach the larger root under the smaller for determinism.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Compose the three layers into a complete graph.
///
/// `docs` is the segmented conversation, `roles` the flattened role list
/// aligned with the sentences in `(doc_index, sent_index)` order. Issue
/// nodes and claims that end up with no parent link to the root; the result
/// satisfies every [`ArgumentGraph`] invariant (checked, violations surface
/// as [`GraphError::InvariantViolation`]).
pub fn assemble(
    docs: &[Vec<Sentence>],
    roles: &[ArgRole],
    scorer: &dyn Scorer,
) -> Result<ArgumentGraph, GraphError> {
    let total: usize = docs.iter().map(Vec::len).sum();
    if roles.len() != total {
        return Err(GraphError::RoleCountMismatch {
            sentences: total,
            roles: roles.len(),
        });
    }

    let mut sentences: Vec<(Sentence, ArgRole)> = docs
        .iter()
        .flatten()
        .cloned()
        .zip(roles.iter().copied())
        .collect();

    let mut edges = Vec::new();
    let mut base = 0usize;
    for doc in docs {
        let len = doc.len();
        edges.extend(build_doc_graph(
            &mut sentences[base..base + len],
            base,
            scorer,
        )?);
        base += len;
    }

    let claims: Vec<(usize, String)> = sentences
        .iter()
        .enumerate()
        .filter(|(_, (_, r))| r.label == ArgLabel::Claim)
        .map(|(i, (s, _))| (i, s.text.clone()))
        .collect();
    let claim_refs: Vec<(usize, &str)> =
        claims.iter().map(|(i, t)| (*i, t.as_str())).collect();
    edges.extend(build_claim_forest(&claim_refs, scorer)?);

    let with_parent: HashSet<usize> = edges
        .iter()
        .filter_map(|e| match e.src {
            NodeId::INode(i) if e.kind == EdgeKind::Support => Some(i),
            _ => None,
        })
        .collect();
    let parentless: Vec<(usize, &str)> = claim_refs
        .iter()
        .filter(|(i, _)| !with_parent.contains(i))
        .copied()
        .collect();
    let (issue_edges, issue_count) = build_issue_layer(&parentless, scorer)?;

    let issue_members: HashSet<usize> = issue_edges
        .iter()
        .filter_map(|e| match e.src {
            NodeId::INode(i) => Some(i),
            _ => None,
        })
        .collect();
    edges.extend(issue_edges);

    for k in 0..issue_count {
        edges.push(Edge::root_link(NodeId::Issue(k)));
    }
    for &(i, _) in &parentless {
        if !issue_members.contains(&i) {
            edges.push(Edge::root_link(NodeId::INode(i)));
        }
    }

    let graph = ArgumentGraph {
        sentences,
        edges,
        issue_count,
    };
    graph.validate()?;
    Ok(graph)
}

/// Keep only argumentative sentences, in original order.
pub fn arg_filter(docs: &[Vec<Sentence>], roles: &[ArgRole]) -> Vec<Sentence> {
    docs.iter()
        .flatten()
        .zip(roles.iter())
        .filter(|(_, r)| r.label != ArgLabel::NonArgument)
        .map(|(s, _)| s.clone())
        .collect()
}

impl ArgumentGraph {
    /// Check every structural invariant; used by [`assemble`] before a graph
    /// is released and directly by property tests.
    pub fn validate(&self) -> Result<(), GraphError> {
        let fail = |msg: String| Err(GraphError::InvariantViolation(msg));
        let n = self.sentences.len();

        let mut out_degree: HashMap<NodeId, usize> = HashMap::new();
        for edge in &self.edges {
            match (edge.kind, edge.src, edge.dst) {
                (EdgeKind::Support, NodeId::INode(_), NodeId::INode(_)) => {}
                (EdgeKind::IssueMember, NodeId::INode(_), NodeId::Issue(_)) => {}
                (EdgeKind::RootLink, NodeId::INode(_) | NodeId::Issue(_), NodeId::Root) => {}
                _ => {
                    return fail(format!(
                        "edge {} -> {} has kind {} with wrong endpoint kinds",
                        edge.src,
                        edge.dst,
                        edge.kind.as_str()
                    ))
                }
            }
            if edge.score.is_some() != (edge.kind == EdgeKind::Support) {
                return fail(format!(
                    "edge {} -> {}: score must be present exactly on support edges",
                    edge.src, edge.dst
                ));
            }
            for node in [edge.src, edge.dst] {
                match node {
                    NodeId::INode(i) if i >= n => {
                        return fail(format!("edge references unknown sentence {i}"))
                    }
                    NodeId::Issue(k) if k >= self.issue_count => {
                        return fail(format!("edge references unknown issue {k}"))
                    }
                    _ => {}
                }
            }
            *out_degree.entry(edge.src).or_insert(0) += 1;
        }

        for (i, (_, role)) in self.sentences.iter().enumerate() {
            let id = NodeId::INode(i);
            let degree = out_degree.get(&id).copied().unwrap_or(0);
            let incoming = self.edges.iter().any(|e| e.dst == id);
            match role.label {
                ArgLabel::NonArgument => {
                    if degree != 0 || incoming {
                        return fail(format!("non-argument sentence {i} participates in edges"));
                    }
                }
                ArgLabel::Premise => {
                    if degree != 1 {
                        return fail(format!("premise {i} has out-degree {degree}, expected 1"));
                    }
                }
                ArgLabel::Claim => {
                    if degree > 1 {
                        return fail(format!("claim {i} has out-degree {degree}, expected <= 1"));
                    }
                }
            }
        }

        // Acyclicity and root reachability: out-degree is at most 1 for every
        // non-root node, so following edges is a chain walk.
        let next: HashMap<NodeId, NodeId> =
            self.edges.iter().map(|e| (e.src, e.dst)).collect();
        for (i, (_, role)) in self.sentences.iter().enumerate() {
            if role.label == ArgLabel::NonArgument {
                continue;
            }
            let mut node = NodeId::INode(i);
            let mut steps = 0usize;
            loop {
                match next.get(&node) {
                    Some(&NodeId::Root) => break,
                    Some(&next_node) => {
                        node = next_node;
                        steps += 1;
                        if steps > n + self.issue_count + 1 {
                            return fail(format!("cycle reachable from sentence {i}"));
                        }
                    }
                    None => {
                        return fail(format!("sentence {i} does not reach the root"));
                    }
                }
            }
        }
        for k in 0..self.issue_count {
            if next.get(&NodeId::Issue(k)) != Some(&NodeId::Root) {
                return fail(format!("issue {k} does not link to the root"));
            }
        }
        Ok(())
    }

    /// Global indices of claims with no outgoing edge at all (viewpoints
    /// attached directly to the root).
    pub fn root_claims(&self) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|e| match (e.kind, e.src) {
                (EdgeKind::RootLink, NodeId::INode(i)) => Some(i),
                _ => None,
            })
            .collect()
    }

    /// JSON form: `{"nodes": [...], "edges": [...]}` with string node ids.
    pub fn to_json(&self) -> serde_json::Value {
        let mut nodes = Vec::new();
        for (i, (sentence, role)) in self.sentences.iter().enumerate() {
            nodes.push(json!({
                "id": NodeId::INode(i).to_string(),
                "kind": "i_node",
                "doc_index": sentence.doc_index,
                "sent_index": sentence.sent_index,
                "role": match role.label {
                    ArgLabel::Claim => "claim",
                    ArgLabel::Premise => "premise",
                    ArgLabel::NonArgument => "non_argument",
                },
                "text": sentence.text,
            }));
        }
        for k in 0..self.issue_count {
            nodes.push(json!({
                "id": NodeId::Issue(k).to_string(),
                "kind": "issue",
            }));
        }
        nodes.push(json!({"id": "root", "kind": "root"}));

        let edges: Vec<serde_json::Value> = self
            .edges
            .iter()
            .map(|e| {
                let mut obj = json!({
                    "src": e.src.to_string(),
                    "dst": e.dst.to_string(),
                    "kind": e.kind.as_str(),
                });
                if let Some(score) = e.score {
                    obj["score"] = json!(score);
                }
                obj
            })
            .collect();

        json!({"nodes": nodes, "edges": edges})
    }

    /// Graphviz DOT form for inspection; support edges are labeled with
    /// their score to three decimals.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph argument_graph {\n  rankdir=BT;\n");
        out.push_str("  \"root\" [label=\"CONVERSATION\", shape=box];\n");
        for k in 0..self.issue_count {
            out.push_str(&format!(
                "  \"issue{k}\" [label=\"ISSUE\", shape=diamond];\n"
            ));
        }
        for (i, (sentence, role)) in self.sentences.iter().enumerate() {
            if role.label == ArgLabel::NonArgument {
                continue;
            }
            let shape = match role.label {
                ArgLabel::Claim => "ellipse",
                _ => "plaintext",
            };
            out.push_str(&format!(
                "  \"i{i}\" [label=\"{}\", shape={shape}];\n",
                escape_dot(&sentence.text)
            ));
        }
        for edge in &self.edges {
            match edge.score {
                Some(score) => out.push_str(&format!(
                    "  \"{}\" -> \"{}\" [label=\"{score:.3}\"];\n",
                    edge.src, edge.dst
                )),
                None => out.push_str(&format!("  \"{}\" -> \"{}\";\n", edge.src, edge.dst)),
            }
        }
        out.push_str("}\n");
        out
    }
}

fn escape_dot(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}
