//! Run configuration: a JSON file plus command-line overrides.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use synthcap::dataset::{load_jsonl, Dataset};
use synthcap::downstream::TrainConfig;
use synthcap::embedding::EmbeddingProvider;
use synthcap::genharness::{ChatEndpoint, MockChatClient};

/// Top-level configuration. Paths are resolved relative to the config
/// file's directory. The seed is mandatory (via file or `--seed`).
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Real caption corpus (JSONL).
    #[serde(default)]
    pub real: Option<PathBuf>,
    /// Synthetic datasets by display name (JSONL each).
    #[serde(default)]
    pub synthetic: BTreeMap<String, PathBuf>,
    /// Balanced disclosed test set.
    #[serde(default)]
    pub t1: Option<PathBuf>,
    /// Undisclosed-only test set.
    #[serde(default)]
    pub t2: Option<PathBuf>,
    #[serde(default)]
    pub bootstrap: BootstrapSection,
    /// Embedding provider; absent means embedding metrics are skipped.
    #[serde(default)]
    pub embedding: Option<EmbeddingProvider>,
    /// Chat endpoint used by `generate` and `sweep`.
    #[serde(default)]
    pub chat: Option<ChatSection>,
    #[serde(default)]
    pub generation: GenerationSection,
    #[serde(default)]
    pub train: TrainConfig,
    #[serde(default)]
    pub augment: AugmentSection,
    /// k for top-k entity overlap and embedding recall.
    #[serde(default = "default_topk")]
    pub topk: usize,
    /// Ranked entities kept in missing/extra entity diffs.
    #[serde(default = "default_diff_top")]
    pub entity_diff_top: usize,
    /// Include real captions in the recall candidate pool.
    #[serde(default = "default_true")]
    pub recall_pool_includes_real: bool,
}

fn default_topk() -> usize {
    100
}

fn default_diff_top() -> usize {
    20
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapSection {
    pub sample_size: usize,
    pub resamples: usize,
    pub confidence: f64,
}

impl Default for BootstrapSection {
    fn default() -> Self {
        BootstrapSection { sample_size: 1000, resamples: 100, confidence: 0.95 }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChatSection {
    /// Deterministic offline endpoint.
    Mock(MockChatClient),
    /// Remote OpenAI-compatible endpoint.
    Remote(ChatEndpoint),
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GenerationSection {
    /// Captions per strategy (split evenly across the two labels).
    pub target_count: usize,
    pub n_captions_per_request: usize,
    #[serde(default)]
    pub request_budget: Option<usize>,
    pub parallelism: usize,
    pub temperature: f64,
    /// Temperatures visited by `sweep`.
    pub sweep_temperatures: Vec<f64>,
}

impl Default for GenerationSection {
    fn default() -> Self {
        GenerationSection {
            target_count: 1000,
            n_captions_per_request: 15,
            request_budget: None,
            parallelism: 4,
            temperature: 0.7,
            sweep_temperatures: vec![0.0, 0.25, 0.5, 0.7, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentSection {
    /// Real records resampled per merge arm.
    pub sample_size: usize,
    pub resamples: usize,
    /// Sample size of the real-only control arm.
    pub real_only_sample: usize,
}

impl Default for AugmentSection {
    fn default() -> Self {
        AugmentSection { sample_size: 1000, resamples: 100, real_only_sample: 2000 }
    }
}

impl RunConfig {
    /// Loads the file and resolves every relative path against its parent
    /// directory.
    pub fn load(path: &Path) -> Result<RunConfig, String> {
        let body = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut config: RunConfig = serde_json::from_str(&body)
            .map_err(|e| format!("invalid config {}: {e}", path.display()))?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        let resolve = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&p);
            }
        };
        if let Some(p) = config.out.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.real.as_mut() {
            resolve(p);
        }
        for p in config.synthetic.values_mut() {
            resolve(p);
        }
        if let Some(p) = config.t1.as_mut() {
            resolve(p);
        }
        if let Some(p) = config.t2.as_mut() {
            resolve(p);
        }
        Ok(config)
    }

    pub fn seed(&self) -> Result<u64, String> {
        self.seed.ok_or_else(|| "a seed is required (config `seed` or --seed)".to_string())
    }

    pub fn out_dir(&self) -> Result<&Path, String> {
        self.out
            .as_deref()
            .ok_or_else(|| "an output directory is required (config `out` or --out)".to_string())
    }

    pub fn load_real(&self) -> Result<Dataset, String> {
        let path = self
            .real
            .as_deref()
            .ok_or_else(|| "config `real` (path to the real dataset) is required".to_string())?;
        load_jsonl(path).map_err(|e| format!("loading real dataset: {e}"))
    }

    /// Loads every configured synthetic dataset, keyed by display name.
    pub fn load_synthetic(&self) -> Result<Vec<(String, Dataset)>, String> {
        if self.synthetic.is_empty() {
            return Err("config `synthetic` must name at least one dataset".to_string());
        }
        let mut out = Vec::new();
        for (name, path) in &self.synthetic {
            let data = load_jsonl(path).map_err(|e| format!("loading synthetic {name:?}: {e}"))?;
            out.push((name.clone(), data));
        }
        Ok(out)
    }
}

/// Stable seed derivation for named sub-experiments.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut hash = 0xcbf2_9ce4_8422_2325u64 ^ base.wrapping_mul(0x0000_0100_0000_01b3);
    for b in tag.bytes() {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
