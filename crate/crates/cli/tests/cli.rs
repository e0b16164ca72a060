//! CLI behavior: exit codes, graph export, report re-rendering.

use std::path::Path;
use std::process::Command;
use synthcap::dataset::{CaptionRecord, Dataset, Label, Source};

fn run_cli(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_synthcap")).args(args).output().expect("run binary")
}

fn fixture(dir: &Path) -> std::path::PathBuf {
    let texts = [
        ("r0", "morning walk #sunrise #calm @mia ☕", Label::Nonsponsored),
        ("r1", "new drop from @glowlab #skincare promo", Label::Sponsored),
        ("r2", "weekend hike #trail #sunrise", Label::Nonsponsored),
        ("r3", "shop the sale #skincare #deal", Label::Sponsored),
        ("r4", "coffee with friends #calm", Label::Nonsponsored),
        ("r5", "brand launch day #deal @glowlab", Label::Sponsored),
    ];
    let records = texts
        .iter()
        .map(|(id, text, label)| CaptionRecord {
            id: id.to_string(),
            text: text.to_string(),
            label: *label,
            source: Source::Real,
            strategy: None,
            shortcode: None,
        })
        .collect();
    let data = Dataset::new("real", records).unwrap();
    let path = dir.join("real.jsonl");
    data.write_jsonl(&path).unwrap();
    path
}

#[test]
fn unknown_flag_exits_one() {
    let out = run_cli(&["fidelity", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_config_file_exits_one() {
    let out = run_cli(&["fidelity", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read config"));
}

#[test]
fn help_exits_zero() {
    let out = run_cli(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["generate", "sweep", "fidelity", "utility", "export-graph", "report"] {
        assert!(text.contains(sub), "help misses {sub}");
    }
}

#[test]
fn fidelity_without_embedding_provider_is_partial() {
    let dir = tempfile::tempdir().unwrap();
    let real = fixture(dir.path());
    let synth = dir.path().join("synth.jsonl");
    let records = (0..5)
        .map(|i| CaptionRecord {
            id: format!("s{i}"),
            text: format!("generated caption {i} #skincare ✨"),
            label: Label::Sponsored,
            source: Source::Synthetic,
            strategy: Some(synthcap::dataset::Strategy::Base),
            shortcode: None,
        })
        .collect();
    Dataset::new("synth", records).unwrap().write_jsonl(&synth).unwrap();

    let config = serde_json::json!({
        "seed": 1,
        "out": dir.path().join("out"),
        "real": real,
        "synthetic": { "base": synth },
        "bootstrap": { "sample_size": 6, "resamples": 5, "confidence": 0.95 }
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = run_cli(&["fidelity", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no provider configured"));

    // The offline provider override turns the same run into a full success.
    let out =
        run_cli(&["fidelity", "--config", config_path.to_str().unwrap(), "--provider", "offline"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn utility_without_t2_is_partial_with_warning() {
    let dir = tempfile::tempdir().unwrap();
    let real = fixture(dir.path());
    let config = serde_json::json!({
        "seed": 1,
        "out": dir.path().join("out"),
        "real": real,
        "synthetic": { "base": real },
        "t1": real,
        "bootstrap": { "sample_size": 6, "resamples": 4, "confidence": 0.95 },
        "augment": { "sample_size": 6, "resamples": 3, "real_only_sample": 6 },
        "train": { "l2_strength": 1.0, "tol": 1e-3, "max_iter": 50 }
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = run_cli(&["utility", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stderr).contains("accuracy columns omitted"));
}

#[test]
fn utility_rejects_nonsponsored_t2() {
    let dir = tempfile::tempdir().unwrap();
    let real = fixture(dir.path());
    let config = serde_json::json!({
        "seed": 1,
        "out": dir.path().join("out"),
        "real": real,
        "synthetic": { "base": real },
        "t1": real,
        "t2": real,
        "train": { "l2_strength": 1.0, "tol": 1e-3, "max_iter": 50 }
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = run_cli(&["utility", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("only sponsored"));
}

#[test]
fn export_graph_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let real = fixture(dir.path());
    let out_csv = dir.path().join("graph.csv");
    let out = run_cli(&[
        "export-graph",
        "--data",
        real.to_str().unwrap(),
        "--kind",
        "ht",
        "--format",
        "edgelist-csv",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let imported = synthcap::network::import_edgelist_csv(&out_csv).unwrap();
    let direct = synthcap::network::build_graph(
        &synthcap::dataset::load_jsonl(&real).unwrap(),
        synthcap::network::GraphKind::HT,
    );
    assert_eq!(imported, direct);

    for format in ["graphml", "dot"] {
        let path = dir.path().join(format!("graph.{format}"));
        let out = run_cli(&[
            "export-graph",
            "--data",
            real.to_str().unwrap(),
            "--kind",
            "hu",
            "--format",
            format,
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{format}");
        assert!(path.exists());
    }
}

#[test]
fn report_rerenders_markdown_from_json() {
    let dir = tempfile::tempdir().unwrap();
    let mut bundle = synthcap::report::ReportBundle::default();
    let mut table = synthcap::report::MetricTable::new("t", "Demo", vec!["A".into()]);
    table.push_row("row", vec!["1.00".into()]);
    bundle.tables.push(table);
    let json_path = dir.path().join("report.json");
    std::fs::write(&json_path, bundle.to_json_pretty()).unwrap();
    let md_path = dir.path().join("again.md");
    let out = run_cli(&[
        "report",
        "--in",
        json_path.to_str().unwrap(),
        "--out",
        md_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_to_string(&md_path).unwrap(), bundle.to_markdown());
}

#[test]
fn remote_generate_without_key_fails_before_any_request() {
    let dir = tempfile::tempdir().unwrap();
    let real = fixture(dir.path());
    let config = serde_json::json!({
        "seed": 1,
        "out": dir.path().join("out"),
        "real": real,
        "chat": {
            "kind": "remote",
            "base_url": "http://127.0.0.1:1",
            "model": "m",
            "api_key_env": "SYNTHCAP_CLI_NO_SUCH_KEY"
        },
        "generation": {
            "target_count": 10, "n_captions_per_request": 5, "parallelism": 1,
            "temperature": 0.5, "sweep_temperatures": [0.5]
        }
    });
    let config_path = dir.path().join("config.json");
    std::fs::write(&config_path, config.to_string()).unwrap();
    let out = run_cli(&["generate", "--config", config_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("SYNTHCAP_CLI_NO_SUCH_KEY"));
}

#[test]
fn example_config_parses() {
    // The shipped example must deserialize; the first failure the CLI may
    // report is the (absent) dataset, never a config parse error.
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../config.example.json");
    let out = run_cli(&["fidelity", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("loading real dataset"), "stderr: {stderr}");
}
