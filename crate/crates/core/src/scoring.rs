//! Argument-role classification and entailment scoring.
//!
//! The pipeline needs two learned judgments: a three-way sentence label
//! (claim / premise / non-argument) and entail / contradict / neutral
//! probabilities for an ordered sentence pair. Both sit behind the
//! [`Scorer`] trait so the rest of the pipeline is a pure function of the
//! scorer's outputs; swapping backends changes values, never shapes or
//! ordering.
//!
//! Two backends ship here:
//!
//! * [`RemoteScorer`] — HTTP+JSON client for a model server implementing
//!   `POST /classify` (`{"texts": [str]}` →
//!   `{"labels": [[p_claim, p_premise, p_non], …]}`) and `POST /nli`
//!   (`{"pairs": [[premise, hypothesis], …]}` →
//!   `{"scores": [[p_entail, p_contradict, p_neutral], …]}`). Requests are
//!   batched; 5xx responses and transport failures are retried with
//!   exponential backoff, anything else is fatal.
//! * [`HeuristicScorer`] — a deterministic lexical fallback so the full
//!   pipeline, golden tests, and CI run without any model dependency. The
//!   exact rule tables are documented on the type and versioned: changing
//!   them is a breaking change to every downstream golden output.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::segment::Sentence;
use crate::text;

const PROB_SUM_TOLERANCE: f64 = 1e-6;

/// Three-way argument role label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgLabel {
    Claim,
    Premise,
    NonArgument,
}

/// A role label with its probability triple `(claim, premise, non_argument)`.
///
/// The label is always the argmax of the triple (first index wins ties) and
/// the probabilities sum to 1 within `1e-6`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArgRole {
    pub label: ArgLabel,
    pub confidence: [f64; 3],
}

impl ArgRole {
    /// Validate a probability triple and derive its label.
    pub fn from_probs(probs: [f64; 3]) -> Result<Self, ScoringError> {
        validate_probs(&probs)?;
        let mut best = 0;
        for i in 1..3 {
            if probs[i] > probs[best] {
                best = i;
            }
        }
        let label = match best {
            0 => ArgLabel::Claim,
            1 => ArgLabel::Premise,
            _ => ArgLabel::NonArgument,
        };
        Ok(ArgRole {
            label,
            confidence: probs,
        })
    }
}

/// Entail / contradict / neutral probabilities for an ordered pair.
///
/// Direction matters: the first text is the premise, the second the
/// hypothesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreTriple {
    pub entail: f64,
    pub contradict: f64,
    pub neutral: f64,
}

impl ScoreTriple {
    pub fn new(entail: f64, contradict: f64, neutral: f64) -> Result<Self, ScoringError> {
        validate_probs(&[entail, contradict, neutral])?;
        Ok(ScoreTriple {
            entail,
            contradict,
            neutral,
        })
    }
}

fn validate_probs(probs: &[f64]) -> Result<(), ScoringError> {
    for &p in probs {
        if !(0.0..=1.0).contains(&p) || !p.is_finite() {
            return Err(ScoringError::InvalidProbabilities {
                probs: probs.to_vec(),
            });
        }
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > PROB_SUM_TOLERANCE {
        return Err(ScoringError::InvalidProbabilities {
            probs: probs.to_vec(),
        });
    }
    Ok(())
}

/// Which scorer implementation to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Remote,
    Heuristic,
}

/// Scorer construction parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerConfig {
    pub backend: Backend,
    /// Base URL of the inference service; required iff `backend = remote`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoint_url: Option<String>,
    pub batch_size: usize,
    pub timeout_ms: u64,
    pub max_retries: u32,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            backend: Backend::Heuristic,
            endpoint_url: None,
            batch_size: 16,
            timeout_ms: 10_000,
            max_retries: 3,
        }
    }
}

impl ScorerConfig {
    pub fn validate(&self) -> Result<(), ScoringError> {
        if self.batch_size == 0 {
            return Err(ScoringError::InvalidConfig(
                "batch_size must be positive".into(),
            ));
        }
        if self.timeout_ms == 0 {
            return Err(ScoringError::InvalidConfig(
                "timeout_ms must be positive".into(),
            ));
        }
        match (self.backend, &self.endpoint_url) {
            (Backend::Remote, None) => Err(ScoringError::InvalidConfig(
                "remote backend requires endpoint_url".into(),
            )),
            (Backend::Heuristic, Some(_)) => Err(ScoringError::InvalidConfig(
                "heuristic backend takes no endpoint_url".into(),
            )),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScoringError {
    #[error("invalid scorer config: {0}")]
    InvalidConfig(String),
    #[error("probability triple violates invariants: {probs:?}")]
    InvalidProbabilities { probs: Vec<f64> },
    #[error("scoring service unreachable after {attempts} attempts: {message}")]
    Unreachable { attempts: u32, message: String },
    #[error("scoring service returned status {status}: {message}")]
    Fatal { status: u16, message: String },
    #[error("scoring service returned {got} results for {expected} inputs")]
    LengthMismatch { expected: usize, got: usize },
    #[error("scoring service returned malformed JSON: {0}")]
    MalformedResponse(String),
}

/// The two judgments the pipeline consumes. Implementations must return one
/// output per input, order-aligned, or fail the whole call.
pub trait Scorer: Send + Sync {
    fn classify(&self, texts: &[&str]) -> Result<Vec<ArgRole>, ScoringError>;
    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<ScoreTriple>, ScoringError>;
}

/// Construct the backend a config describes.
pub fn scorer_from_config(cfg: &ScorerConfig) -> Result<Box<dyn Scorer>, ScoringError> {
    cfg.validate()?;
    match cfg.backend {
        Backend::Heuristic => Ok(Box::new(HeuristicScorer)),
        Backend::Remote => Ok(Box::new(RemoteScorer::new(cfg)?)),
    }
}

/// Classify one role per sentence, order-aligned with the input.
pub fn classify_roles(
    sentences: &[Sentence],
    cfg: &ScorerConfig,
) -> Result<Vec<ArgRole>, ScoringError> {
    let scorer = scorer_from_config(cfg)?;
    let texts: Vec<&str> = sentences.iter().map(|s| s.text.as_str()).collect();
    scorer.classify(&texts)
}

/// Score a single ordered (premise, hypothesis) pair.
pub fn score_pair(
    premise_text: &str,
    hypothesis_text: &str,
    cfg: &ScorerConfig,
) -> Result<ScoreTriple, ScoringError> {
    let scorer = scorer_from_config(cfg)?;
    let out = scorer.score_pairs(&[(premise_text, hypothesis_text)])?;
    Ok(out[0])
}

/// Score many ordered pairs; equals mapping [`score_pair`] element-wise.
pub fn score_pairs_batch(
    pairs: &[(&str, &str)],
    cfg: &ScorerConfig,
) -> Result<Vec<ScoreTriple>, ScoringError> {
    let scorer = scorer_from_config(cfg)?;
    scorer.score_pairs(pairs)
}

// ---------------------------------------------------------------------------
// Heuristic backend
// ---------------------------------------------------------------------------

/// Deterministic lexical scorer (rule tables version 1).
///
/// Classification applies the first matching rule, on whitespace tokens
/// lowercased with edge punctuation stripped:
///
/// 1. fewer than 3 tokens → non_argument `(0.05, 0.05, 0.90)`
/// 2. text ends with `?` → non_argument `(0.10, 0.10, 0.80)`
/// 3. first token is a greeting/meta word → non_argument `(0.10, 0.15, 0.75)`
/// 4. any causal/evidence marker present → premise `(0.15, 0.70, 0.15)`
/// 5. any modal/stance marker present → claim `(0.70, 0.15, 0.15)`
/// 6. otherwise → premise `(0.20, 0.55, 0.25)`
///
/// Pair scoring compares content-word sets (the metric tokenizer minus
/// stopwords, with negation markers extracted first):
///
/// * `overlap` = |hypothesis ∩ premise| / |hypothesis|, 0 when the
///   hypothesis has no content words;
/// * `indicator` = 1 when exactly one side carries a negation marker, or the
///   sides carry opposite members of the antonym table; else 0;
/// * `entail = overlap × (1 − indicator)`, `contradict = overlap × indicator`,
///   `neutral = 1 − overlap`.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicScorer;

const GREETING_MARKERS: &[&str] = &[
    "thanks", "thank", "hello", "hi", "hey", "welcome", "cheers", "lol", "edit", "update",
    "disclaimer", "source", "sincerely", "regards",
];

const CAUSAL_MARKERS: &[&str] = &[
    "because", "since", "therefore", "thus", "hence", "consequently", "accordingly", "evidence",
    "research", "study", "studies", "data", "statistics", "example", "instance", "percent",
    "according",
];

const STANCE_MARKERS: &[&str] = &[
    "should", "must", "ought", "shall", "need", "needs", "believe", "think", "argue", "claim",
    "claims", "opinion", "clearly", "obviously", "certainly", "definitely", "wrong", "right",
    "good", "bad", "better", "worse", "best", "worst", "important", "essential", "agree",
    "disagree", "support", "oppose",
];

const NEGATION_MARKERS: &[&str] = &[
    "not", "no", "never", "none", "nothing", "nobody", "neither", "nor", "cannot", "cant",
    "dont", "doesnt", "didnt", "isnt", "arent", "wasnt", "werent", "wont", "shouldnt",
    "couldnt", "wouldnt", "aint",
];

const ANTONYM_PAIRS: &[(&str, &str)] = &[
    ("good", "bad"),
    ("right", "wrong"),
    ("true", "false"),
    ("agree", "disagree"),
    ("more", "less"),
    ("increase", "decrease"),
    ("safe", "dangerous"),
    ("legal", "illegal"),
    ("support", "oppose"),
    ("better", "worse"),
    ("best", "worst"),
    ("always", "never"),
    ("everyone", "nobody"),
];

impl HeuristicScorer {
    fn classify_one(text: &str) -> ArgRole {
        let tokens = text::tokenize(text);
        let probs = if tokens.len() < 3 {
            [0.05, 0.05, 0.90]
        } else if text.trim_end().ends_with('?') {
            [0.10, 0.10, 0.80]
        } else if GREETING_MARKERS.contains(&tokens[0].as_str()) {
            [0.10, 0.15, 0.75]
        } else if tokens.iter().any(|t| CAUSAL_MARKERS.contains(&t.as_str())) {
            [0.15, 0.70, 0.15]
        } else if tokens.iter().any(|t| STANCE_MARKERS.contains(&t.as_str())) {
            [0.70, 0.15, 0.15]
        } else {
            [0.20, 0.55, 0.25]
        };
        ArgRole::from_probs(probs).expect("rule table probabilities are valid")
    }

    fn score_one(premise: &str, hypothesis: &str) -> ScoreTriple {
        let premise_tokens = text::tokenize(premise);
        let hypothesis_tokens = text::tokenize(hypothesis);
        let premise_negated = premise_tokens
            .iter()
            .any(|t| NEGATION_MARKERS.contains(&t.as_str()));
        let hypothesis_negated = hypothesis_tokens
            .iter()
            .any(|t| NEGATION_MARKERS.contains(&t.as_str()));

        let mut premise_content = text::content_word_set(premise);
        let mut hypothesis_content = text::content_word_set(hypothesis);
        for marker in NEGATION_MARKERS {
            premise_content.remove(*marker);
            hypothesis_content.remove(*marker);
        }

        let overlap = if hypothesis_content.is_empty() {
            0.0
        } else {
            hypothesis_content.intersection(&premise_content).count() as f64
                / hypothesis_content.len() as f64
        };

        let antonym_clash = ANTONYM_PAIRS.iter().any(|&(a, b)| {
            (premise_content.contains(a) && hypothesis_content.contains(b))
                || (premise_content.contains(b) && hypothesis_content.contains(a))
        });
        let indicator = if premise_negated != hypothesis_negated || antonym_clash {
            1.0
        } else {
            0.0
        };

        let entail = overlap * (1.0 - indicator);
        let contradict = overlap * indicator;
        let neutral = 1.0 - overlap;
        ScoreTriple::new(entail, contradict, neutral).expect("formula stays in [0,1]")
    }
}

impl Scorer for HeuristicScorer {
    fn classify(&self, texts: &[&str]) -> Result<Vec<ArgRole>, ScoringError> {
        Ok(texts.iter().map(|t| Self::classify_one(t)).collect())
    }

    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<ScoreTriple>, ScoringError> {
        Ok(pairs.iter().map(|(p, h)| Self::score_one(p, h)).collect())
    }
}

// ---------------------------------------------------------------------------
// Remote backend
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ClassifyRequest<'a> {
    texts: &'a [&'a str],
}

#[derive(Deserialize)]
struct ClassifyResponse {
    labels: Vec<[f64; 3]>,
}

#[derive(Serialize)]
struct NliRequest<'a> {
    pairs: Vec<[&'a str; 2]>,
}

#[derive(Deserialize)]
struct NliResponse {
    scores: Vec<[f64; 3]>,
}

/// HTTP+JSON client for an external inference service.
pub struct RemoteScorer {
    endpoint: String,
    batch_size: usize,
    max_retries: u32,
    agent: ureq::Agent,
}

impl RemoteScorer {
    pub fn new(cfg: &ScorerConfig) -> Result<Self, ScoringError> {
        cfg.validate()?;
        let endpoint = cfg
            .endpoint_url
            .clone()
            .ok_or_else(|| ScoringError::InvalidConfig("remote backend requires endpoint_url".into()))?;
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_millis(cfg.timeout_ms))
            .build();
        Ok(RemoteScorer {
            endpoint: endpoint.trim_end_matches('/').to_string(),
            batch_size: cfg.batch_size,
            max_retries: cfg.max_retries,
            agent,
        })
    }

    /// POST a JSON body, retrying 5xx and transport errors with exponential
    /// backoff. Any other non-200 status is fatal. A batch either succeeds
    /// whole or the operation fails: no partial results.
    fn post_with_retry(
        &self,
        path: &str,
        body: &serde_json::Value,
    ) -> Result<serde_json::Value, ScoringError> {
        let url = format!("{}{}", self.endpoint, path);
        let mut last_error = String::new();
        for attempt in 0..=self.max_retries {
            if attempt > 0 {
                std::thread::sleep(backoff_delay(attempt));
            }
            match self.agent.post(&url).send_json(body.clone()) {
                Ok(response) => {
                    return response
                        .into_json::<serde_json::Value>()
                        .map_err(|e| ScoringError::MalformedResponse(e.to_string()));
                }
                Err(ureq::Error::Status(status, response)) => {
                    let text = response.into_string().unwrap_or_default();
                    if (500..600).contains(&status) {
                        last_error = format!("status {status}: {text}");
                        continue;
                    }
                    return Err(ScoringError::Fatal {
                        status,
                        message: text,
                    });
                }
                Err(ureq::Error::Transport(t)) => {
                    last_error = t.to_string();
                    continue;
                }
            }
        }
        Err(ScoringError::Unreachable {
            attempts: self.max_retries + 1,
            message: last_error,
        })
    }
}

/// Exponential backoff starting at 100 ms, capped at 5 s, with jitter so
/// simultaneous clients do not retry in lockstep.
fn backoff_delay(attempt: u32) -> Duration {
    let base_ms = 100u64.saturating_mul(1 << attempt.min(10)).min(5_000);
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.subsec_nanos() as u64)
        .unwrap_or(0);
    let jitter = nanos % (base_ms / 2 + 1);
    Duration::from_millis(base_ms + jitter)
}

impl Scorer for RemoteScorer {
    fn classify(&self, texts: &[&str]) -> Result<Vec<ArgRole>, ScoringError> {
        let mut roles = Vec::with_capacity(texts.len());
        for chunk in texts.chunks(self.batch_size) {
            let body = serde_json::to_value(ClassifyRequest { texts: chunk })
                .expect("request serializes");
            let value = self.post_with_retry("/classify", &body)?;
            let parsed: ClassifyResponse = serde_json::from_value(value)
                .map_err(|e| ScoringError::MalformedResponse(e.to_string()))?;
            if parsed.labels.len() != chunk.len() {
                return Err(ScoringError::LengthMismatch {
                    expected: chunk.len(),
                    got: parsed.labels.len(),
                });
            }
            for probs in parsed.labels {
                roles.push(ArgRole::from_probs(probs)?);
            }
        }
        Ok(roles)
    }

    fn score_pairs(&self, pairs: &[(&str, &str)]) -> Result<Vec<ScoreTriple>, ScoringError> {
        let mut triples = Vec::with_capacity(pairs.len());
        for chunk in pairs.chunks(self.batch_size) {
            let body = serde_json::to_value(NliRequest {
                pairs: chunk.iter().map(|&(p, h)| [p, h]).collect(),
            })
            .expect("request serializes");
            let value = self.post_with_retry("/nli", &body)?;
            let parsed: NliResponse = serde_json::from_value(value)
                .map_err(|e| ScoringError::MalformedResponse(e.to_string()))?;
            if parsed.scores.len() != chunk.len() {
                return Err(ScoringError::LengthMismatch {
                    expected: chunk.len(),
                    got: parsed.scores.len(),
                });
            }
            for [e, c, n] in parsed.scores {
                triples.push(ScoreTriple::new(e, c, n)?);
            }
        }
        Ok(triples)
    }
}
