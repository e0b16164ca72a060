//! Caption generation harness: prompt construction, chat-completion
//! clients, schema-validated response parsing, success-rate accounting,
//! and the temperature sweep experiment.
//!
//! Raw responses are persisted before parsing, so any run directory can be
//! re-parsed offline and its success rate recomputed from disk.

mod client;
mod parse;
mod prompt;

pub use client::{
    captions_tool_schema, ChatClient, ChatEndpoint, ChatRequest, HttpChatClient, MockChatClient,
};
pub use parse::{parse_response, ParseOutcome};
pub use prompt::{build_prompt, PromptStrategy, EXAMPLES_PER_PROMPT};

use crate::content;
use crate::dataset::{CaptionRecord, Dataset, Label, Source, Strategy};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("invalid strategy: {0}")]
    InvalidStrategy(String),
    #[error("example pool too small: need {needed} usable examples, found {got}")]
    PoolTooSmall { needed: usize, got: usize },
    #[error("temperature {0} outside the supported range [0, 1]")]
    TemperatureOutOfRange(f64),
    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("chat endpoint returned status {status} after {attempts} attempts")]
    RemoteFailure { status: u16, attempts: u32 },
    #[error("chat request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("io error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid run directory: {0}")]
    BadRunDir(String),
    #[error(transparent)]
    Content(#[from] content::ContentError),
    #[error(transparent)]
    Dataset(#[from] crate::dataset::DatasetError),
}

/// Sizing and determinism knobs for one generation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub target_count: usize,
    pub seed: u64,
    /// Cap on issued requests; defaults to three times the minimum needed.
    pub request_budget: Option<usize>,
    /// Concurrent in-flight requests per wave.
    pub parallelism: usize,
}

impl GenerationConfig {
    pub fn new(target_count: usize, seed: u64) -> GenerationConfig {
        GenerationConfig { target_count, seed, request_budget: None, parallelism: 4 }
    }

    fn budget(&self, per_request: usize) -> usize {
        self.request_budget.unwrap_or_else(|| 3 * self.target_count.div_ceil(per_request.max(1)))
    }
}

/// Audit record of one request: the raw response exactly as received plus
/// its parse accounting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub index: usize,
    /// Captions the prompt asked for.
    pub requested: usize,
    pub raw: String,
    pub accepted: usize,
    pub rejected_entries: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

/// Outcome of one generation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationRun {
    pub kind: Strategy,
    pub label: Label,
    pub temperature: f64,
    pub seed: u64,
    pub requests: Vec<RequestRecord>,
    pub captions: Dataset,
    pub requested_captions: usize,
    pub accepted_captions: usize,
    /// 100 x accepted / requested.
    pub success_rate: f64,
    pub unique_pct: f64,
    /// Whether the target count was reached within the request budget.
    pub complete: bool,
}

/// Issues requests of `n_captions_per_request` until `target_count`
/// captions parse or the budget runs out. Requests run in bounded waves;
/// results are aggregated in request-index order, so runs against a
/// deterministic client replay byte-identically.
pub fn run_generation<C: ChatClient>(
    strategy: &PromptStrategy,
    temperature: f64,
    cfg: &GenerationConfig,
    client: &C,
) -> Result<GenerationRun, GenError> {
    if !(0.0..=1.0).contains(&temperature) {
        return Err(GenError::TemperatureOutOfRange(temperature));
    }
    strategy.validate()?;
    // Surface prompt construction problems before any request is sent.
    build_prompt(strategy, cfg.seed)?;

    let per_request = strategy.n_captions_per_request;
    let budget = cfg.budget(per_request);
    let mut records: Vec<RequestRecord> = Vec::new();
    let mut accepted_texts: Vec<String> = Vec::new();

    while accepted_texts.len() < cfg.target_count && records.len() < budget {
        let wave_start = records.len();
        // Issue no more requests than the remaining target could need.
        let needed = (cfg.target_count - accepted_texts.len()).div_ceil(per_request.max(1));
        let wave = cfg.parallelism.max(1).min(budget - wave_start).min(needed);
        let wave_records: Vec<RequestRecord> = (wave_start..wave_start + wave)
            .into_par_iter()
            .map(|index| {
                let prompt = match build_prompt(strategy, cfg.seed.wrapping_add(index as u64)) {
                    Ok(p) => p,
                    Err(e) => {
                        return RequestRecord {
                            index,
                            requested: per_request,
                            raw: String::new(),
                            accepted: 0,
                            rejected_entries: 0,
                            failure: Some(e.to_string()),
                        }
                    }
                };
                let request = ChatRequest { prompt, temperature, index, n_captions: per_request };
                match client.complete(&request) {
                    Ok(raw) => {
                        let outcome = parse_response(&raw);
                        RequestRecord {
                            index,
                            requested: per_request,
                            accepted: outcome.accepted.len(),
                            rejected_entries: outcome.rejected_entries,
                            failure: outcome.failure,
                            raw,
                        }
                    }
                    Err(e) => RequestRecord {
                        index,
                        requested: per_request,
                        raw: String::new(),
                        accepted: 0,
                        rejected_entries: 0,
                        failure: Some(e.to_string()),
                    },
                }
            })
            .collect();
        for record in wave_records {
            accepted_texts.extend(parse_response(&record.raw).accepted);
            records.push(record);
        }
    }

    let requested_captions: usize = records.iter().map(|r| r.requested).sum();
    let accepted_captions = accepted_texts.len();
    let label_tag = match strategy.label {
        Label::Sponsored => "sp",
        Label::Nonsponsored => "ns",
    };
    let caption_records: Vec<CaptionRecord> = accepted_texts
        .into_iter()
        .enumerate()
        .map(|(i, text)| CaptionRecord {
            id: format!("{}-{}-{:05}", strategy.kind.as_str(), label_tag, i),
            text,
            label: strategy.label,
            source: Source::Synthetic,
            strategy: Some(strategy.kind),
            shortcode: None,
        })
        .collect();
    let captions =
        Dataset::new(format!("{}-{}", strategy.kind.as_str(), label_tag), caption_records)?;
    let unique_pct =
        if captions.is_empty() { 0.0 } else { content::unique_caption_pct(&captions)? };
    let success_rate = if requested_captions == 0 {
        0.0
    } else {
        100.0 * accepted_captions as f64 / requested_captions as f64
    };

    Ok(GenerationRun {
        kind: strategy.kind,
        label: strategy.label,
        temperature,
        seed: cfg.seed,
        requests: records,
        captions,
        requested_captions,
        accepted_captions,
        success_rate,
        unique_pct,
        complete: accepted_captions >= cfg.target_count,
    })
}

/// Run metadata persisted alongside the raw responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunDescriptor {
    pub kind: Strategy,
    pub label: Label,
    pub temperature: f64,
    pub seed: u64,
    pub n_captions_per_request: usize,
    pub target_count: usize,
    pub request_budget: usize,
    pub success_rate: f64,
    pub unique_pct: f64,
    pub complete: bool,
}

/// Writes a run directory: `config.json`, `requests/NNNN.json` (raw
/// responses), and `captions.jsonl`.
pub fn write_run(run: &GenerationRun, dir: &Path) -> Result<(), GenError> {
    let io_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| GenError::Io { path, source }
    };
    let requests_dir = dir.join("requests");
    std::fs::create_dir_all(&requests_dir).map_err(io_err(&requests_dir))?;
    let descriptor = RunDescriptor {
        kind: run.kind,
        label: run.label,
        temperature: run.temperature,
        seed: run.seed,
        n_captions_per_request: run.requests.first().map(|r| r.requested).unwrap_or(0),
        target_count: run.captions.len(),
        request_budget: run.requests.len(),
        success_rate: run.success_rate,
        unique_pct: run.unique_pct,
        complete: run.complete,
    };
    let config_path = dir.join("config.json");
    std::fs::write(&config_path, serde_json::to_string_pretty(&descriptor).expect("descriptor"))
        .map_err(io_err(&config_path))?;
    for record in &run.requests {
        let path = requests_dir.join(format!("{:04}.json", record.index));
        std::fs::write(&path, serde_json::to_string_pretty(record).expect("record"))
            .map_err(io_err(&path))?;
    }
    run.captions.write_jsonl(&dir.join("captions.jsonl"))?;
    Ok(())
}

/// Recomputes the success rate of a persisted run by re-parsing every raw
/// response on disk.
pub fn replay_success_rate(dir: &Path) -> Result<f64, GenError> {
    let requests_dir = dir.join("requests");
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&requests_dir)
        .map_err(|source| GenError::Io { path: requests_dir.clone(), source })?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(GenError::BadRunDir(format!(
            "{} holds no request records",
            requests_dir.display()
        )));
    }
    let mut requested = 0usize;
    let mut accepted = 0usize;
    for path in paths {
        let body = std::fs::read_to_string(&path)
            .map_err(|source| GenError::Io { path: path.clone(), source })?;
        let record: RequestRecord = serde_json::from_str(&body)
            .map_err(|e| GenError::BadRunDir(format!("{}: {e}", path.display())))?;
        requested += record.requested;
        accepted += parse_response(&record.raw).accepted.len();
    }
    if requested == 0 {
        return Ok(0.0);
    }
    Ok(100.0 * accepted as f64 / requested as f64)
}

/// One row of the temperature sweep table. Metric columns are empty when
/// the run at that temperature failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub temperature: f64,
    pub unique_pct: Option<f64>,
    pub success_rate: Option<f64>,
    pub hashtag_overlap: Option<f64>,
    pub usertag_overlap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Sweep results plus the underlying runs (absent for failed temperatures).
#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub runs: Vec<Option<GenerationRun>>,
}

/// Runs one generation per temperature and reports uniqueness, success
/// rate, and tag overlap against the real dataset. Failed temperatures
/// leave a flagged gap; the sweep continues.
pub fn temperature_sweep<C: ChatClient>(
    strategy: &PromptStrategy,
    temps: &[f64],
    cfg: &GenerationConfig,
    real: &Dataset,
    client: &C,
) -> Result<SweepOutcome, GenError> {
    for &t in temps {
        if !(0.0..=1.0).contains(&t) {
            return Err(GenError::TemperatureOutOfRange(t));
        }
    }
    let mut rows = Vec::with_capacity(temps.len());
    let mut runs = Vec::with_capacity(temps.len());
    for &temperature in temps {
        match run_generation(strategy, temperature, cfg, client) {
            Ok(run) => {
                let (hashtag, usertag) = if run.captions.is_empty() {
                    (None, None)
                } else {
                    (
                        Some(
                            content::tag_overlap(&run.captions, real, content::TagKind::Hashtag)?
                                .pct,
                        ),
                        Some(
                            content::tag_overlap(&run.captions, real, content::TagKind::Usertag)?
                                .pct,
                        ),
                    )
                };
                rows.push(SweepRow {
                    temperature,
                    unique_pct: Some(run.unique_pct),
                    success_rate: Some(run.success_rate),
                    hashtag_overlap: hashtag,
                    usertag_overlap: usertag,
                    error: None,
                });
                runs.push(Some(run));
            }
            Err(e) => {
                rows.push(SweepRow {
                    temperature,
                    unique_pct: None,
                    success_rate: None,
                    hashtag_overlap: None,
                    usertag_overlap: None,
                    error: Some(e.to_string()),
                });
                runs.push(None);
            }
        }
    }
    Ok(SweepOutcome { rows, runs })
}
