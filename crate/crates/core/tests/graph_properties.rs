//! Property tests for graph construction: random conversations with an
//! injected seeded scorer, checked against independent invariant verifiers
//! written in this file (not the library's own `validate`).

use std::collections::{HashMap, HashSet};

use convograph_core::arggraph::{assemble, ArgumentGraph, NodeId};
use convograph_core::linearize::linearize;
use convograph_core::scoring::{ArgLabel, ArgRole, ScoreTriple, Scorer, ScoringError};
use convograph_core::segment::Sentence;

/// SplitMix64: tiny deterministic generator for fixture construction.
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next_u64() % n
    }
}

/// Scorer whose triples are a pure hash of the text pair and a seed.
struct HashScorer {
    seed: u64,
}

impl HashScorer {
    fn triple(&self, premise: &str, hypothesis: &str) -> ScoreTriple {
        let mut h = self.seed ^ 0xcbf2_9ce4_8422_2325;
        for b in premise.bytes().chain([0xff]).chain(hypothesis.bytes()) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01B3);
        }
        let u1 = (h >> 11) as f64 / (1u64 << 53) as f64;
        let u2 = ((h.wrapping_mul(0x9E37_79B9_7F4A_7C15)) >> 11) as f64 / (1u64 << 53) as f64;
        let entail = u1;
        let contradict = u2 * (1.0 - entail);
        ScoreTriple::new(entail, contradict, 1.0 - entail - contradict).unwrap()
    }
}

impl Scorer for HashScorer {
    fn classify(&self, texts: &[&str]) -> Result<Vec<ArgRole>, ScoringError> {
        Ok(texts
            .iter()
            .map(|_| ArgRole::from_probs([0.2, 0.55, 0.25]).unwrap())
            .collect())
    }

    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<ScoreTriple>, ScoringError> {
        Ok(pairs.iter().map(|&(p, h)| self.triple(p, h)).collect())
    }
}

fn random_conversation(rng: &mut Rng, case: usize) -> (Vec<Vec<Sentence>>, Vec<ArgRole>) {
    let doc_count = 1 + rng.below(4) as usize;
    let mut remaining = 1 + rng.below(20) as usize;
    let mut docs = Vec::new();
    let mut roles = Vec::new();
    let mut global = 0usize;
    for doc_index in 0..doc_count {
        if remaining == 0 {
            break;
        }
        let take = 1 + rng.below(remaining.min(8) as u64) as usize;
        remaining -= take;
        let mut sentences = Vec::new();
        for sent_index in 0..take {
            // A unique marker token per sentence makes occurrence counting
            // in the linearization unambiguous.
            let text = format!("case{case} marker{global}x token{}", rng.below(50));
            sentences.push(Sentence {
                doc_index,
                sent_index,
                text,
                span: (0, 1),
            });
            let probs = match rng.below(100) {
                0..=34 => [0.8, 0.1, 0.1],
                35..=79 => [0.1, 0.8, 0.1],
                _ => [0.1, 0.1, 0.8],
            };
            roles.push(ArgRole::from_probs(probs).unwrap());
            global += 1;
        }
        docs.push(sentences);
    }
    (docs, roles)
}

// --- independent invariant verifiers -------------------------------------

fn check_acyclic(graph: &ArgumentGraph) {
    let mut adjacency: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    let mut nodes: HashSet<NodeId> = HashSet::new();
    for e in &graph.edges {
        adjacency.entry(e.src).or_default().push(e.dst);
        nodes.insert(e.src);
        nodes.insert(e.dst);
    }
    let mut states: HashMap<NodeId, u8> = HashMap::new(); // 1 = open, 2 = done
    fn dfs(
        node: NodeId,
        adjacency: &HashMap<NodeId, Vec<NodeId>>,
        states: &mut HashMap<NodeId, u8>,
    ) {
        states.insert(node, 1);
        for &next in adjacency.get(&node).into_iter().flatten() {
            match states.get(&next) {
                Some(1) => panic!("cycle through {next}"),
                Some(_) => {}
                None => dfs(next, adjacency, states),
            }
        }
        states.insert(node, 2);
    }
    for &node in &nodes {
        if !states.contains_key(&node) {
            dfs(node, &adjacency, &mut states);
        }
    }
}

fn check_reachability_and_degrees(graph: &ArgumentGraph) {
    let mut outgoing: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for e in &graph.edges {
        outgoing.entry(e.src).or_default().push(e.dst);
    }
    for (i, (_, role)) in graph.sentences.iter().enumerate() {
        let id = NodeId::INode(i);
        let degree = outgoing.get(&id).map_or(0, Vec::len);
        match role.label {
            ArgLabel::Premise => assert_eq!(degree, 1, "premise {i} out-degree"),
            ArgLabel::Claim => assert!(degree <= 1, "claim {i} out-degree {degree}"),
            ArgLabel::NonArgument => {
                assert_eq!(degree, 0, "non-argument {i} has outgoing edges");
                assert!(
                    graph.edges.iter().all(|e| e.dst != id),
                    "non-argument {i} has incoming edges"
                );
            }
        }
        if role.label != ArgLabel::NonArgument {
            // Walk to the root; path length is bounded by the node count.
            let mut node = id;
            let mut hops = 0usize;
            while node != NodeId::Root {
                let next = outgoing
                    .get(&node)
                    .and_then(|v| v.first())
                    .unwrap_or_else(|| panic!("node {node} is stuck before the root"));
                node = *next;
                hops += 1;
                assert!(hops <= graph.sentences.len() + graph.issue_count + 1);
            }
            assert!(hops >= 1);
        }
    }
}

#[test]
fn fuzzed_graphs_satisfy_all_invariants() {
    let mut rng = Rng(0x5eed_0001);
    for case in 0..300 {
        let (docs, roles) = random_conversation(&mut rng, case);
        let scorer = HashScorer {
            seed: rng.next_u64(),
        };
        let graph = assemble(&docs, &roles, &scorer)
            .unwrap_or_else(|e| panic!("case {case}: assemble failed: {e}"));
        check_acyclic(&graph);
        check_reachability_and_degrees(&graph);
    }
}

#[test]
fn identical_scores_produce_identical_graphs() {
    let mut rng = Rng(0xdee7_e44);
    for case in 0..40 {
        let (docs, roles) = random_conversation(&mut rng, case);
        let seed = rng.next_u64();
        let a = assemble(&docs, &roles, &HashScorer { seed }).unwrap();
        let b = assemble(&docs, &roles, &HashScorer { seed }).unwrap();
        assert_eq!(a, b, "case {case} not deterministic");
    }
}

#[test]
fn linearization_contains_each_argumentative_sentence_once() {
    let mut rng = Rng(0x11ea_12e);
    for case in 0..60 {
        let (docs, roles) = random_conversation(&mut rng, case);
        let scorer = HashScorer {
            seed: rng.next_u64(),
        };
        let graph = assemble(&docs, &roles, &scorer).unwrap();
        let out = linearize(&graph, None).unwrap();
        for (i, (sentence, role)) in graph.sentences.iter().enumerate() {
            let marker = format!("marker{i}x");
            let count = out.text.matches(&marker).count();
            if role.label == ArgLabel::NonArgument {
                assert_eq!(count, 0, "case {case}: non-argument {i} rendered");
            } else {
                assert_eq!(count, 1, "case {case}: sentence {i} rendered {count} times");
            }
            let _ = sentence;
        }
    }
}

#[test]
fn truncated_linearization_is_a_prefix() {
    let mut rng = Rng(0x93ef_1234);
    for case in 0..40 {
        let (docs, roles) = random_conversation(&mut rng, case);
        let scorer = HashScorer {
            seed: rng.next_u64(),
        };
        let graph = assemble(&docs, &roles, &scorer).unwrap();
        let full = linearize(&graph, None).unwrap();
        let budget = 1 + rng.below(30) as usize;
        let cut = linearize(&graph, Some(budget)).unwrap();
        assert!(full.text.starts_with(&cut.text), "case {case}");
        assert!(cut.token_count <= budget);
        assert_eq!(cut.truncated, full.token_count > budget);
    }
}
