//! Integration tests for the command-line surface: exit codes, error
//! reporting, sidecar files, and per-command output shapes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn convograph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_convograph"))
        .args(args)
        .env_remove("CONVOGRAPH_SCORER_ENDPOINT")
        .output()
        .expect("binary runs")
}

fn words(n: usize) -> String {
    (0..n).map(|i| format!("w{i}")).collect::<Vec<_>>().join(" ")
}

#[test]
fn help_exits_zero() {
    let out = convograph(&["--help"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for subcommand in ["ingest", "prepare", "baseline", "stats", "graph"] {
        assert!(text.contains(subcommand), "--help missing {subcommand}");
    }
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = convograph(&["prepare", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_line_exits_2_and_names_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("bad.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"conv_id":"ok","domain":"reddit","posts":[{"post_id":"p0","role":"comment","body":"hello there"}]}"#,
            "\n",
            "this is not json\n",
        ),
    )
    .unwrap();

    let out = convograph(&[
        "ingest",
        "--input",
        corpus.to_str().unwrap(),
        "--output",
        dir.path().join("out.jsonl").to_str().unwrap(),
        "--report",
        dir.path().join("report.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("line 2"), "stderr was: {stderr}");
}

#[test]
fn ingest_writes_mixed_eligibility_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.jsonl");

    // One eligible conversation (5 posts x 100 words), one too small.
    let eligible_posts: Vec<String> = (0..5)
        .map(|i| format!(r#"{{"post_id":"e{i}","role":"comment","body":"{}"}}"#, words(100)))
        .collect();
    let line1 = format!(
        r#"{{"conv_id":"big","domain":"reddit","posts":[{}]}}"#,
        eligible_posts.join(",")
    );
    let line2 = r#"{"conv_id":"small","domain":"reddit","posts":[{"post_id":"s0","role":"comment","body":"short body here"}]}"#;
    std::fs::write(&corpus, format!("{line1}\n{line2}\n")).unwrap();

    let output = dir.path().join("normalized.jsonl");
    let report = dir.path().join("eligibility.jsonl");
    let out = convograph(&[
        "ingest",
        "--input",
        corpus.to_str().unwrap(),
        "--output",
        output.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let report_text = std::fs::read_to_string(&report).unwrap();
    let lines: Vec<serde_json::Value> = report_text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["conv_id"], "big");
    assert_eq!(lines[0]["eligible"], true);
    assert_eq!(lines[0]["violated_rules"].as_array().unwrap().len(), 0);
    assert_eq!(lines[1]["conv_id"], "small");
    assert_eq!(lines[1]["eligible"], false);
    assert!(lines[1]["violated_rules"]
        .as_array()
        .unwrap()
        .iter()
        .any(|v| v == "too_few_posts"));

    // The normalized corpus re-parses to the same number of conversations,
    // and a resolved config sits beside the output.
    assert_eq!(std::fs::read_to_string(&output).unwrap().lines().count(), 2);
    assert!(dir.path().join("normalized.jsonl.config.toml").exists());
}

#[test]
fn prepare_arg_graph_emits_no_non_argument_sentences() {
    // "Thanks for reading!" classifies as non-argument; it must not appear
    // in the arg-graph rendering.
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"conv_id":"c","domain":"reddit","posts":["#,
            r#"{"post_id":"p0","role":"comment","body":"Thanks for reading! We should plant trees because shade cools streets."},"#,
            r#"{"post_id":"p1","role":"comment","body":"Trees are good for air quality. Studies measured cleaner air."}"#,
            r#"]}"#,
            "\n"
        ),
    )
    .unwrap();

    let output = dir.path().join("prep.jsonl");
    let out = convograph(&[
        "prepare",
        "--corpus",
        corpus.to_str().unwrap(),
        "--variant",
        "arg-graph",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&output).unwrap();
    assert!(!text.contains("Thanks for reading"), "output: {text}");
    assert!(text.contains("CONVERSATION"));
}

#[test]
fn baseline_oracle_without_reference_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        r#"{"conv_id":"noref","domain":"reddit","posts":[{"post_id":"p0","role":"comment","body":"some body text here"}]}"#,
    )
    .unwrap();

    let out = convograph(&[
        "baseline",
        "--corpus",
        corpus.to_str().unwrap(),
        "--method",
        "oracle",
        "--output",
        dir.path().join("o.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("noref"), "stderr: {stderr}");
}

#[test]
fn baseline_records_have_the_documented_shape() {
    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("lex.jsonl");
    let out = convograph(&[
        "baseline",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--method",
        "lexrank",
        "--budget",
        "40",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    for line in std::fs::read_to_string(&output).unwrap().lines() {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(record["method"], "lexrank");
        assert!(record["selected_indices"].is_array());
        assert!(record["summary_text"].is_string());
        // Fixture conversations with references get scored.
        if record["conv_id"] != "c06" {
            assert!(record["rouge"]["r1"]["f1"].is_f64(), "line: {line}");
        }
    }
}

#[test]
fn lexrank_on_single_sentence_conversation_selects_it() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        r#"{"conv_id":"one","domain":"reddit","posts":[{"post_id":"p0","role":"comment","body":"the only sentence here"}]}"#,
    )
    .unwrap();

    let output = dir.path().join("lex.jsonl");
    let out = convograph(&[
        "baseline",
        "--corpus",
        corpus.to_str().unwrap(),
        "--method",
        "lexrank",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&output).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(record["selected_indices"].as_array().unwrap().len(), 1);
    assert_eq!(record["summary_text"], "the only sentence here");
}

#[test]
fn oracle_on_reference_equal_sentence_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("c.jsonl");
    std::fs::write(
        &corpus,
        concat!(
            r#"{"conv_id":"exact","domain":"reddit","reference_summary":"solar panels cut emissions measurably","posts":["#,
            r#"{"post_id":"p0","role":"comment","body":"Solar panels cut emissions measurably. Unrelated filler text follows here."}"#,
            r#"]}"#,
            "\n"
        ),
    )
    .unwrap();

    let output = dir.path().join("oracle.jsonl");
    let out = convograph(&[
        "baseline",
        "--corpus",
        corpus.to_str().unwrap(),
        "--method",
        "oracle",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let record: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&output).unwrap().lines().next().unwrap())
            .unwrap();
    let f1 = record["rouge"]["r1"]["f1"].as_f64().unwrap();
    assert!((f1 - 1.0).abs() < 1e-9, "rouge-1 f1 = {f1}");
}

#[test]
fn prepare_outputs_match_library_composition() {
    use convograph_core::corpus::{parse_corpus, CorpusFormat};
    use convograph_core::pipeline::{prepare, Variant};
    use convograph_core::scoring::HeuristicScorer;
    use convograph_core::segment::Segmenter;

    let corpus_path = fixture("corpus_small.jsonl");
    let conversations = parse_corpus(&corpus_path, CorpusFormat::Jsonl).unwrap();
    let segmenter = Segmenter::default();

    let dir = tempfile::tempdir().unwrap();
    for (variant_flag, variant) in [
        ("raw", Variant::Raw),
        ("arg-filtered", Variant::ArgFiltered),
        ("arg-graph", Variant::ArgGraph),
    ] {
        let output = dir.path().join(format!("{variant_flag}.jsonl"));
        let out = convograph(&[
            "prepare",
            "--corpus",
            corpus_path.to_str().unwrap(),
            "--variant",
            variant_flag,
            "--output",
            output.to_str().unwrap(),
        ]);
        assert!(out.status.success());

        let text = std::fs::read_to_string(&output).unwrap();
        for (line, conv) in text.lines().zip(&conversations) {
            let record: serde_json::Value = serde_json::from_str(line).unwrap();
            let expected =
                prepare(conv, variant, &segmenter, &HeuristicScorer, Some(2048)).unwrap();
            assert_eq!(record["conv_id"], conv.conv_id.as_str());
            assert_eq!(record["text"], expected.text.as_str(), "{variant_flag}");
            assert_eq!(record["truncated"], expected.truncated);
        }
    }
}

#[test]
fn baseline_outputs_match_library_composition() {
    use convograph_core::corpus::{parse_corpus, CorpusFormat};
    use convograph_core::extractive::{
        extract_top, lexrank, DEFAULT_DAMPING, DEFAULT_SIMILARITY_THRESHOLD, DEFAULT_TOLERANCE,
    };
    use convograph_core::segment::Segmenter;

    let corpus_path = fixture("corpus_small.jsonl");
    let conversations = parse_corpus(&corpus_path, CorpusFormat::Jsonl).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let output = dir.path().join("lexrank.jsonl");
    let out = convograph(&[
        "baseline",
        "--corpus",
        corpus_path.to_str().unwrap(),
        "--method",
        "lexrank",
        "--budget",
        "50",
        "--output",
        output.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let segmenter = Segmenter::default();
    for (line, conv) in std::fs::read_to_string(&output).unwrap().lines().zip(&conversations) {
        let record: serde_json::Value = serde_json::from_str(line).unwrap();
        let sentences: Vec<_> = segmenter
            .segment_conversation(conv)
            .unwrap()
            .into_iter()
            .flatten()
            .collect();
        let expected = extract_top(
            &lexrank(
                &sentences,
                DEFAULT_DAMPING,
                DEFAULT_SIMILARITY_THRESHOLD,
                DEFAULT_TOLERANCE,
            ),
            50,
        );
        assert_eq!(record["summary_text"], expected.text().as_str(), "{}", conv.conv_id);
    }
}

#[test]
fn stats_tsv_has_domain_rows_and_overall() {
    let out = convograph(&[
        "stats",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--format",
        "tsv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("domain\texamples"));
    for domain in ["email", "generic", "nyt", "reddit", "stack"] {
        assert!(
            lines.iter().any(|l| l.starts_with(&format!("{domain}\t"))),
            "missing row for {domain}"
        );
    }
    assert!(lines.last().unwrap().starts_with("all\t"));
}

#[test]
fn stats_json_aggregation_is_mean_of_per_conversation_values() {
    let out = convograph(&[
        "stats",
        "--corpus",
        fixture("abstractive.jsonl").to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["overall"]["examples"], 4);

    // Recompute the mean input length directly from the library.
    let convs = convograph_core::corpus::parse_corpus(
        &fixture("abstractive.jsonl"),
        convograph_core::corpus::CorpusFormat::Jsonl,
    )
    .unwrap();
    let expected: f64 = convs
        .iter()
        .map(|c| convograph_core::metrics::input_length(c) as f64)
        .sum::<f64>()
        / convs.len() as f64;
    let got = report["overall"]["mean_input_tokens"].as_f64().unwrap();
    assert!((got - expected).abs() < 1e-9);
}

#[test]
fn graph_command_emits_dot_and_json() {
    let out = convograph(&[
        "graph",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--conv-id",
        "c01",
        "--format",
        "dot",
    ]);
    assert!(out.status.success());
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("digraph argument_graph {"));
    assert!(dot.contains("CONVERSATION"));
    assert!(dot.contains("->"));

    let out = convograph(&[
        "graph",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--conv-id",
        "c01",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(value["nodes"].as_array().unwrap().iter().any(|n| n["id"] == "root"));
    assert!(!value["edges"].as_array().unwrap().is_empty());

    let out = convograph(&[
        "graph",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--conv-id",
        "missing",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn remote_backend_without_endpoint_exits_1() {
    let out = convograph(&[
        "prepare",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--scorer",
        "remote",
        "--output",
        "/tmp/never-written.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unreachable_remote_endpoint_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let out = convograph(&[
        "prepare",
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--scorer",
        "remote",
        "--endpoint",
        "http://127.0.0.1:1",
        "--timeout-ms",
        "200",
        "--max-retries",
        "0",
        "--output",
        dir.path().join("x.jsonl").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_file_drives_variant_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    std::fs::write(&config, "[pipeline]\nvariant = \"raw\"\nmax_tokens = 64\n").unwrap();

    let out_raw = dir.path().join("from-config.jsonl");
    let out = convograph(&[
        "prepare",
        "--config",
        config.to_str().unwrap(),
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--output",
        out_raw.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let first: serde_json::Value =
        serde_json::from_str(std::fs::read_to_string(&out_raw).unwrap().lines().next().unwrap())
            .unwrap();
    assert_eq!(first["variant"], "raw");

    let out_graph = dir.path().join("flag-wins.jsonl");
    let out = convograph(&[
        "prepare",
        "--config",
        config.to_str().unwrap(),
        "--corpus",
        fixture("corpus_small.jsonl").to_str().unwrap(),
        "--variant",
        "arg-graph",
        "--output",
        out_graph.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let first: serde_json::Value = serde_json::from_str(
        std::fs::read_to_string(&out_graph)
            .unwrap()
            .lines()
            .next()
            .unwrap(),
    )
    .unwrap();
    assert_eq!(first["variant"], "arg-graph");

    // The resolved config records the effective settings.
    let resolved = std::fs::read_to_string(dir.path().join("flag-wins.jsonl.config.toml")).unwrap();
    assert!(resolved.contains("variant = \"arg-graph\""));
    assert!(resolved.contains("max_tokens = 64"));
}
