//! `convograph` — turn conversation threads into argument graphs,
//! summarizer inputs, extractive baselines, and corpus statistics.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use convograph_cli::commands::{
    cmd_baseline, cmd_graph, cmd_ingest, cmd_prepare, cmd_stats, stats_to_tsv, BaselineMethod,
    GraphFormat,
};
use convograph_cli::config::{resolve, write_resolved_config, PipelineConfig, ScorerOverrides};
use convograph_cli::CliError;

use convograph_core::pipeline::Variant;
use convograph_core::scoring::Backend;

#[derive(Parser)]
#[command(
    name = "convograph",
    version,
    about = "Argument-graph preprocessing for multi-party conversation summarization"
)]
struct Cli {
    /// TOML config file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Scorer backend: heuristic or remote.
    #[arg(long, global = true)]
    scorer: Option<String>,

    /// Remote scorer base URL (also CONVOGRAPH_SCORER_ENDPOINT).
    #[arg(long, global = true)]
    endpoint: Option<String>,

    /// Remote scorer request batch size.
    #[arg(long, global = true)]
    batch_size: Option<usize>,

    /// Remote scorer request timeout in milliseconds.
    #[arg(long, global = true)]
    timeout_ms: Option<u64>,

    /// Retries for transient remote failures.
    #[arg(long, global = true)]
    max_retries: Option<u32>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a corpus and write it back normalized, with an eligibility
    /// report sidecar.
    Ingest {
        /// Input corpus (JSONL, one conversation per line).
        #[arg(long)]
        input: PathBuf,
        /// Input format.
        #[arg(long, default_value = "jsonl")]
        format: String,
        /// Normalized corpus output path.
        #[arg(long)]
        output: PathBuf,
        /// Eligibility report sidecar path.
        #[arg(long)]
        report: PathBuf,
    },
    /// Render summarizer inputs (raw, arg-filtered, or arg-graph) to JSONL.
    Prepare {
        #[arg(long)]
        corpus: PathBuf,
        /// Input variant: raw, arg-filtered, or arg-graph.
        #[arg(long)]
        variant: Option<Variant>,
        /// Token budget per rendered input.
        #[arg(long)]
        max_tokens: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Run an unsupervised extractive baseline (or the oracle).
    Baseline {
        #[arg(long)]
        corpus: PathBuf,
        /// lexrank, textrank, or oracle.
        #[arg(long)]
        method: BaselineMethod,
        /// Selection budget in tokens.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Compute corpus statistics (lengths, novel n-grams, oracle ROUGE,
    /// multi-document characteristics).
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        /// Layout-bias segment count.
        #[arg(long)]
        segments: Option<usize>,
        /// Report format: json or tsv.
        #[arg(long, default_value = "json")]
        format: String,
        /// Report path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Emit one conversation's argument graph as DOT or JSON.
    Graph {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        conv_id: String,
        /// dot or json.
        #[arg(long, default_value = "dot")]
        format: GraphFormat,
        /// Output path; stdout when omitted.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

impl Cli {
    fn overrides(&self) -> Result<ScorerOverrides, CliError> {
        let backend = match self.scorer.as_deref() {
            None => None,
            Some("heuristic") => Some(Backend::Heuristic),
            Some("remote") => Some(Backend::Remote),
            Some(other) => {
                return Err(CliError::Usage(format!(
                    "unknown scorer backend {other:?} (expected heuristic or remote)"
                )))
            }
        };
        Ok(ScorerOverrides {
            backend,
            endpoint_url: self.endpoint.clone(),
            batch_size: self.batch_size,
            timeout_ms: self.timeout_ms,
            max_retries: self.max_retries,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not errors.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let overrides = cli.overrides()?;
    let mut cfg: PipelineConfig = resolve(cli.config.as_deref(), &overrides)?;

    match &cli.command {
        Command::Ingest {
            input,
            format,
            output,
            report,
        } => {
            if format != "jsonl" {
                return Err(CliError::Usage(format!(
                    "unknown corpus format {format:?} (expected jsonl)"
                )));
            }
            let summary = cmd_ingest(input, output, report)?;
            write_resolved_config("ingest", input, output, &cfg)?;
            eprintln!(
                "ingested {} conversations ({} eligible) -> {}",
                summary.conversations,
                summary.eligible,
                output.display()
            );
        }
        Command::Prepare {
            corpus,
            variant,
            max_tokens,
            output,
        } => {
            if let Some(v) = variant {
                cfg.variant = *v;
            }
            if let Some(m) = max_tokens {
                cfg.max_tokens = *m;
            }
            let count = cmd_prepare(corpus, output, &cfg)?;
            write_resolved_config("prepare", corpus, output, &cfg)?;
            eprintln!(
                "prepared {count} {} inputs -> {}",
                cfg.variant.as_str(),
                output.display()
            );
        }
        Command::Baseline {
            corpus,
            method,
            budget,
            output,
        } => {
            if let Some(b) = budget {
                cfg.budget_tokens = *b;
            }
            let count = cmd_baseline(corpus, output, *method, cfg.budget_tokens)?;
            write_resolved_config("baseline", corpus, output, &cfg)?;
            eprintln!(
                "ran {} on {count} conversations -> {}",
                method.as_str(),
                output.display()
            );
        }
        Command::Stats {
            corpus,
            segments,
            format,
            output,
        } => {
            if let Some(s) = segments {
                cfg.segments = *s;
            }
            let report = cmd_stats(corpus, &cfg)?;
            let rendered = match format.as_str() {
                "json" => {
                    let mut text = serde_json::to_string_pretty(&report)
                        .expect("stats report serializes");
                    text.push('\n');
                    text
                }
                "tsv" => stats_to_tsv(&report),
                other => {
                    return Err(CliError::Usage(format!(
                        "unknown stats format {other:?} (expected json or tsv)"
                    )))
                }
            };
            match output {
                Some(path) => {
                    std::fs::write(path, rendered).map_err(|e| {
                        CliError::Data(format!("cannot write {}: {e}", path.display()))
                    })?;
                    write_resolved_config("stats", corpus, path, &cfg)?;
                }
                None => print!("{rendered}"),
            }
        }
        Command::Graph {
            corpus,
            conv_id,
            format,
            output,
        } => match output {
            Some(path) => {
                let mut buffer = Vec::new();
                cmd_graph(corpus, conv_id, *format, &cfg, &mut buffer)?;
                std::fs::write(path, buffer).map_err(|e| {
                    CliError::Data(format!("cannot write {}: {e}", path.display()))
                })?;
                write_resolved_config("graph", corpus, path, &cfg)?;
            }
            None => {
                let stdout = std::io::stdout();
                let mut lock = stdout.lock();
                cmd_graph(corpus, conv_id, *format, &cfg, &mut lock)?;
                lock.flush()
                    .map_err(|e| CliError::Data(format!("cannot flush stdout: {e}")))?;
            }
        },
    }
    Ok(())
}
