//! Run configuration: TOML file, environment, and flag overrides.
//!
//! Precedence, highest first: command-line flags, the
//! `CONVOGRAPH_SCORER_ENDPOINT` environment variable (endpoint only), the
//! `--config` TOML file, built-in defaults. Every command that writes an
//! output file also writes the fully resolved configuration next to it as
//! `<output>.config.toml`, so a run can be reproduced from its artifacts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use convograph_core::pipeline::Variant;
use convograph_core::scoring::{Backend, ScorerConfig};

use crate::CliError;

/// Environment variable holding the remote scorer endpoint.
pub const ENDPOINT_ENV_VAR: &str = "CONVOGRAPH_SCORER_ENDPOINT";

/// The resolved settings a run executes with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub scorer: ScorerConfig,
    pub variant: Variant,
    /// Token budget applied to prepared inputs.
    pub max_tokens: usize,
    /// Token budget for extractive selections.
    pub budget_tokens: usize,
    /// Layout-bias segment count for the stats report.
    pub segments: usize,
    /// Recorded for provenance; the pipeline itself never samples.
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            scorer: ScorerConfig::default(),
            variant: Variant::ArgGraph,
            max_tokens: 2048,
            budget_tokens: 90,
            segments: 4,
            seed: 0,
        }
    }
}

/// Optional fields as they appear in a TOML config file.
#[derive(Debug, Default, Clone, Deserialize)]
pub struct ConfigFile {
    #[serde(default)]
    pub scorer: ScorerFileSection,
    #[serde(default)]
    pub pipeline: PipelineFileSection,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Default, Clone, Deserialize)]
pub struct ScorerFileSection {
    pub backend: Option<Backend>,
    pub endpoint_url: Option<String>,
    pub batch_size: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub max_retries: Option<u32>,
}

#[derive(Debug, Default, Clone, Deserialize)]
pub struct PipelineFileSection {
    pub variant: Option<Variant>,
    pub max_tokens: Option<usize>,
    pub budget_tokens: Option<usize>,
    pub segments: Option<usize>,
}

/// Scorer-related command-line overrides, shared by every subcommand.
#[derive(Debug, Default, Clone)]
pub struct ScorerOverrides {
    pub backend: Option<Backend>,
    pub endpoint_url: Option<String>,
    pub batch_size: Option<usize>,
    pub timeout_ms: Option<u64>,
    pub max_retries: Option<u32>,
}

/// Load the config file (when given) and fold in environment and flag
/// overrides. The resulting scorer config is validated here so a bad
/// combination fails as a usage error before any data is read.
pub fn resolve(
    config_path: Option<&Path>,
    overrides: &ScorerOverrides,
) -> Result<PipelineConfig, CliError> {
    let file = match config_path {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            toml::from_str::<ConfigFile>(&raw).map_err(|e| {
                CliError::Usage(format!("cannot parse config {}: {e}", path.display()))
            })?
        }
        None => ConfigFile::default(),
    };

    let mut cfg = PipelineConfig::default();
    if let Some(b) = file.scorer.backend {
        cfg.scorer.backend = b;
    }
    if let Some(u) = file.scorer.endpoint_url {
        cfg.scorer.endpoint_url = Some(u);
    }
    if let Some(n) = file.scorer.batch_size {
        cfg.scorer.batch_size = n;
    }
    if let Some(t) = file.scorer.timeout_ms {
        cfg.scorer.timeout_ms = t;
    }
    if let Some(r) = file.scorer.max_retries {
        cfg.scorer.max_retries = r;
    }
    if let Some(v) = file.pipeline.variant {
        cfg.variant = v;
    }
    if let Some(m) = file.pipeline.max_tokens {
        cfg.max_tokens = m;
    }
    if let Some(b) = file.pipeline.budget_tokens {
        cfg.budget_tokens = b;
    }
    if let Some(s) = file.pipeline.segments {
        cfg.segments = s;
    }
    if let Some(seed) = file.seed {
        cfg.seed = seed;
    }

    if let Ok(endpoint) = std::env::var(ENDPOINT_ENV_VAR) {
        if !endpoint.is_empty() {
            cfg.scorer.endpoint_url = Some(endpoint);
        }
    }

    if let Some(b) = overrides.backend {
        cfg.scorer.backend = b;
    }
    if let Some(u) = &overrides.endpoint_url {
        cfg.scorer.endpoint_url = Some(u.clone());
    }
    if let Some(n) = overrides.batch_size {
        cfg.scorer.batch_size = n;
    }
    if let Some(t) = overrides.timeout_ms {
        cfg.scorer.timeout_ms = t;
    }
    if let Some(r) = overrides.max_retries {
        cfg.scorer.max_retries = r;
    }

    // An endpoint may linger from file or env while the backend stays
    // heuristic; drop it rather than failing validation.
    if cfg.scorer.backend == Backend::Heuristic {
        cfg.scorer.endpoint_url = None;
    }
    cfg.scorer
        .validate()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    if cfg.segments == 0 {
        return Err(CliError::Usage("segments must be positive".into()));
    }
    Ok(cfg)
}

/// Provenance record written beside each output file.
#[derive(Debug, Serialize)]
struct ResolvedRun<'a> {
    command: &'a str,
    input: String,
    output: String,
    config: &'a PipelineConfig,
}

/// Write `<output>.config.toml` describing the run that produced `output`.
pub fn write_resolved_config(
    command: &str,
    input: &Path,
    output: &Path,
    cfg: &PipelineConfig,
) -> Result<(), CliError> {
    let run = ResolvedRun {
        command,
        input: input.display().to_string(),
        output: output.display().to_string(),
        config: cfg,
    };
    let body = toml::to_string_pretty(&run)
        .map_err(|e| CliError::Usage(format!("cannot serialize resolved config: {e}")))?;
    let path = resolved_config_path(output);
    std::fs::write(&path, body)
        .map_err(|e| CliError::Data(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn resolved_config_path(output: &Path) -> PathBuf {
    let mut name = output.file_name().unwrap_or_default().to_os_string();
    name.push(".config.toml");
    output.with_file_name(name)
}
