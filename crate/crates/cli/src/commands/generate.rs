//! The `generate` command: produces one synthetic dataset for a prompt
//! strategy, half sponsored and half non-sponsored, persisting raw
//! responses and the merged captions.jsonl.

use std::path::Path;
use synthcap::dataset::{fixed_sample, Dataset, Label, Strategy};
use synthcap::genharness::{
    run_generation, write_run, ChatClient, GenerationConfig, GenerationRun, HttpChatClient,
    MockChatClient, PromptStrategy, EXAMPLES_PER_PROMPT,
};

use super::{runtime, usage, CliError, CmdStatus};
use crate::config::{derive_seed, ChatSection, RunConfig};

/// A chat client behind either configuration kind.
pub enum AnyChatClient {
    Mock(MockChatClient),
    Remote(Box<HttpChatClient>),
}

impl ChatClient for AnyChatClient {
    fn complete(
        &self,
        request: &synthcap::genharness::ChatRequest,
    ) -> Result<String, synthcap::genharness::GenError> {
        match self {
            AnyChatClient::Mock(c) => c.complete(request),
            AnyChatClient::Remote(c) => c.complete(request),
        }
    }
}

/// Builds the configured chat client, failing before any request when the
/// endpoint is remote and no API key is present.
pub fn chat_client(config: &RunConfig, seed: u64) -> Result<AnyChatClient, CliError> {
    match &config.chat {
        None => Err(usage("config `chat` (endpoint or mock) is required for generation")),
        Some(ChatSection::Mock(mock)) => {
            let mut mock = mock.clone();
            if mock.seed == 0 {
                mock.seed = derive_seed(seed, "chat-mock");
            }
            Ok(AnyChatClient::Mock(mock))
        }
        Some(ChatSection::Remote(endpoint)) => Ok(AnyChatClient::Remote(Box::new(
            HttpChatClient::new(endpoint).map_err(|e| usage(e.to_string()))?,
        ))),
    }
}

/// Assembles the prompt strategy for one (kind, label) pair, sourcing
/// examples from the real dataset where the strategy needs them.
pub fn prompt_strategy(
    kind: Strategy,
    label: Label,
    real: &Dataset,
    seed: u64,
) -> Result<PromptStrategy, CliError> {
    let strategy = PromptStrategy::new(kind, label);
    match kind {
        Strategy::Base => Ok(strategy),
        Strategy::FixedExamples => {
            let pool = label_pool(real, label)?;
            let sample =
                fixed_sample(&pool, EXAMPLES_PER_PROMPT, derive_seed(seed, "fixed-examples"))
                    .map_err(|e| usage(format!("sampling fixed examples: {e}")))?;
            Ok(strategy
                .with_fixed_examples(sample.records.iter().map(|r| r.text.clone()).collect()))
        }
        Strategy::RandomExamples | Strategy::Imitation => {
            Ok(strategy.with_example_pool(label_pool(real, label)?))
        }
    }
}

fn label_pool(real: &Dataset, label: Label) -> Result<Dataset, CliError> {
    let records: Vec<_> = real.records.iter().filter(|r| r.label == label).cloned().collect();
    if records.len() < EXAMPLES_PER_PROMPT {
        return Err(usage(format!(
            "real dataset holds only {} records labeled {label:?}; {EXAMPLES_PER_PROMPT} needed for examples",
            records.len()
        )));
    }
    Dataset::new(format!("{}:{label:?}", real.name), records).map_err(|e| usage(e.to_string()))
}

/// Runs generation for both labels of one strategy and writes the merged
/// dataset. Returns the merged captions.
pub fn generate_strategy(
    config: &RunConfig,
    kind: Strategy,
    temperature: f64,
    out_dir: &Path,
    client: &AnyChatClient,
) -> Result<(Dataset, Vec<GenerationRun>), CliError> {
    let seed = config.seed().map_err(usage)?;
    let real = config.load_real().map_err(usage)?;
    let target = config.generation.target_count;
    let mut merged: Vec<synthcap::dataset::CaptionRecord> = Vec::new();
    let mut runs = Vec::new();

    for (label, dir_name, label_target) in [
        (Label::Sponsored, "sponsored", target.div_ceil(2)),
        (Label::Nonsponsored, "nonsponsored", target / 2),
    ] {
        let mut strategy = prompt_strategy(kind, label, &real, seed)?;
        strategy.n_captions_per_request = config.generation.n_captions_per_request;
        let gen_cfg = GenerationConfig {
            target_count: label_target,
            seed: derive_seed(seed, &format!("generate:{}:{dir_name}", kind.as_str())),
            request_budget: config.generation.request_budget,
            parallelism: config.generation.parallelism,
        };
        let run = run_generation(&strategy, temperature, &gen_cfg, client)
            .map_err(|e| runtime(format!("{} {dir_name}: {e}", kind.as_str())))?;
        if !run.complete {
            eprintln!(
                "warning: {} {dir_name} run incomplete: {}/{} captions within budget",
                kind.as_str(),
                run.accepted_captions,
                label_target
            );
        }
        let run_dir = out_dir.join(dir_name);
        write_run(&run, &run_dir).map_err(|e| runtime(e.to_string()))?;
        merged.extend(run.captions.records.iter().cloned());
        runs.push(run);
    }

    let merged = Dataset::new(kind.as_str().to_string(), merged)
        .map_err(|e| runtime(format!("merging captions: {e}")))?;
    merged.write_jsonl(&out_dir.join("captions.jsonl")).map_err(|e| runtime(e.to_string()))?;
    Ok((merged, runs))
}

pub fn run(
    config: &RunConfig,
    strategy: Option<Strategy>,
    temperature: Option<f64>,
) -> Result<CmdStatus, CliError> {
    let seed = config.seed().map_err(usage)?;
    let out_root = config.out_dir().map_err(usage)?.join("generate");
    let client = chat_client(config, seed)?;
    let temperature = temperature.unwrap_or(config.generation.temperature);
    let strategies: Vec<Strategy> = match strategy {
        Some(s) => vec![s],
        None => Strategy::ALL.to_vec(),
    };

    let mut any_incomplete = false;
    for kind in strategies {
        let dir = out_root.join(kind.as_str());
        std::fs::create_dir_all(&dir)
            .map_err(|e| runtime(format!("creating {}: {e}", dir.display())))?;
        let (merged, runs) = generate_strategy(config, kind, temperature, &dir, &client)?;
        any_incomplete |= runs.iter().any(|r| !r.complete);
        let success: f64 = {
            let requested: usize = runs.iter().map(|r| r.requested_captions).sum();
            let accepted: usize = runs.iter().map(|r| r.accepted_captions).sum();
            if requested == 0 {
                0.0
            } else {
                100.0 * accepted as f64 / requested as f64
            }
        };
        println!(
            "{}: {} captions written to {} (success rate {:.2}%)",
            kind.as_str(),
            merged.len(),
            dir.join("captions.jsonl").display(),
            success
        );
    }
    Ok(if any_incomplete { CmdStatus::Partial } else { CmdStatus::Success })
}
