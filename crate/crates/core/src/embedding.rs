//! Caption embeddings and similarity analytics.
//!
//! Two providers share one interface: a remote JSON-over-HTTP embeddings
//! endpoint (OpenAI-compatible request/response shape, key read from an
//! environment variable, disk cache keyed by content hash), and a
//! deterministic offline provider that feature-hashes normalized unigrams
//! into a fixed number of buckets. Similarity analytics are exact: pooled
//! pairwise cosine statistics and top-k neighbor recall.

use crate::dataset::Dataset;
use crate::textfeat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Which provider produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProviderKind {
    Remote,
    Offline,
}

/// Row-per-record embedding matrix. Every row is L2-normalized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingMatrix {
    pub vectors: Vec<Vec<f64>>,
    pub dim: usize,
    pub ids: Vec<String>,
    pub provider: ProviderKind,
    /// Ids of records whose feature set was empty; their rows were replaced
    /// by the first unit basis vector.
    pub degenerate: Vec<String>,
}

#[derive(Debug, Error)]
pub enum EmbedError {
    #[error("embedding dimension mismatch: expected {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("row for {id:?} has {got} dimensions, expected {expected}")]
    RaggedRow { id: String, expected: usize, got: usize },
    #[error("API key environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("embeddings endpoint returned status {status} after {attempts} attempts (request ids: {request_ids:?})")]
    RemoteFailure { status: u16, attempts: u32, request_ids: Vec<String> },
    #[error("embeddings request failed: {0}")]
    Transport(#[from] reqwest::Error),
    #[error("malformed embeddings response: {0}")]
    BadResponse(String),
    #[error("cache error at {path}: {source}")]
    Cache {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("embedding needs {needed} requests but the budget allows {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("candidate pool of {pool} is smaller than k = {k}")]
    PoolTooSmall { pool: usize, k: usize },
    #[error("cannot embed an empty dataset")]
    EmptyDataset,
}

impl EmbeddingMatrix {
    /// Builds a matrix from raw rows, L2-normalizing each one. Zero rows
    /// are replaced by the first unit basis vector and flagged degenerate.
    pub fn from_rows(
        ids: Vec<String>,
        rows: Vec<Vec<f64>>,
        provider: ProviderKind,
    ) -> Result<EmbeddingMatrix, EmbedError> {
        assert_eq!(ids.len(), rows.len(), "id/row count mismatch");
        if rows.is_empty() {
            return Err(EmbedError::EmptyDataset);
        }
        let dim = rows[0].len();
        let mut degenerate = Vec::new();
        let mut vectors = Vec::with_capacity(rows.len());
        for (id, mut row) in ids.iter().zip(rows) {
            if row.len() != dim {
                return Err(EmbedError::RaggedRow {
                    id: id.clone(),
                    expected: dim,
                    got: row.len(),
                });
            }
            let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm == 0.0 {
                row = vec![0.0; dim];
                row[0] = 1.0;
                degenerate.push(id.clone());
            } else {
                for v in &mut row {
                    *v /= norm;
                }
            }
            vectors.push(row);
        }
        Ok(EmbeddingMatrix { vectors, dim, ids, provider, degenerate })
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }
}

/// Deterministic offline provider: feature-hashed bag of normalized
/// unigrams. Embedding is a pure function of (text, seed, dim).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OfflineProvider {
    pub dim: usize,
    pub seed: u64,
}

impl Default for OfflineProvider {
    fn default() -> Self {
        OfflineProvider { dim: 256, seed: 0 }
    }
}

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a64(seed: u64, bytes: &[u8]) -> u64 {
    let mut hash = FNV_OFFSET ^ seed.wrapping_mul(FNV_PRIME);
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

impl OfflineProvider {
    pub fn embed_text(&self, text: &str) -> Vec<f64> {
        let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
        let unigrams = textfeat::normalize_tokens(&tokens, false);
        let mut row = vec![0.0; self.dim];
        for gram in &unigrams {
            let bucket = (fnv1a64(self.seed, gram.as_bytes()) % self.dim as u64) as usize;
            row[bucket] += 1.0;
        }
        row
    }

    pub fn embed(&self, data: &Dataset) -> Result<EmbeddingMatrix, EmbedError> {
        let ids: Vec<String> = data.records.iter().map(|r| r.id.clone()).collect();
        let rows: Vec<Vec<f64>> = data.texts().map(|t| self.embed_text(t)).collect();
        EmbeddingMatrix::from_rows(ids, rows, ProviderKind::Offline)
    }
}

/// Remote embeddings endpoint configuration. The API key is read from the
/// `api_key_env` environment variable (default `OPENAI_API_KEY`), never
/// from configuration files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteProvider {
    pub base_url: String,
    pub model: String,
    #[serde(default = "default_api_key_env")]
    pub api_key_env: String,
    /// Expected vector dimensionality; a mismatching response is an error.
    pub expected_dim: Option<usize>,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_backoff_ms")]
    pub backoff_ms: u64,
    /// Cap on requests per embed call; exceeding it is an error rather
    /// than unbounded spend.
    #[serde(default)]
    pub request_budget: Option<usize>,
    /// Content-addressed on-disk cache directory.
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

pub(crate) fn default_api_key_env() -> String {
    "OPENAI_API_KEY".to_string()
}

fn default_batch_size() -> usize {
    100
}

fn default_max_retries() -> u32 {
    3
}

fn default_backoff_ms() -> u64 {
    250
}

#[derive(Deserialize)]
struct EmbeddingsResponse {
    data: Vec<EmbeddingRow>,
}

#[derive(Deserialize)]
struct EmbeddingRow {
    index: usize,
    embedding: Vec<f64>,
}

impl RemoteProvider {
    fn cache_key(&self, text: &str) -> String {
        let mut hasher = Sha256::new();
        hasher.update(b"remote\x1f");
        hasher.update(self.model.as_bytes());
        hasher.update(b"\x1f");
        hasher.update(text.as_bytes());
        format!("{:x}", hasher.finalize())
    }

    pub fn embed(&self, data: &Dataset) -> Result<EmbeddingMatrix, EmbedError> {
        if data.is_empty() {
            return Err(EmbedError::EmptyDataset);
        }
        let api_key = std::env::var(&self.api_key_env)
            .map_err(|_| EmbedError::MissingApiKey(self.api_key_env.clone()))?;

        let cache = self.cache_dir.as_deref().map(EmbeddingCache::open).transpose()?;
        let texts: Vec<&str> = data.texts().collect();
        let mut rows: Vec<Option<Vec<f64>>> = vec![None; texts.len()];
        let mut misses: Vec<usize> = Vec::new();
        for (i, text) in texts.iter().enumerate() {
            let key = self.cache_key(text);
            match cache.as_ref().and_then(|c| c.get(&key)) {
                Some(row) => rows[i] = Some(row),
                None => misses.push(i),
            }
        }

        let client = reqwest::blocking::Client::new();
        let url = format!("{}/embeddings", self.base_url.trim_end_matches('/'));
        let batches = misses.len().div_ceil(self.batch_size.max(1));
        if let Some(budget) = self.request_budget {
            if batches > budget {
                return Err(EmbedError::BudgetExceeded { needed: batches, budget });
            }
        }
        for batch in misses.chunks(self.batch_size.max(1)) {
            let inputs: Vec<&str> = batch.iter().map(|&i| texts[i]).collect();
            let body = serde_json::json!({ "model": self.model, "input": inputs });
            let response = self.post_with_retry(&client, &url, &api_key, &body)?;
            let parsed: EmbeddingsResponse =
                response.json().map_err(|e| EmbedError::BadResponse(e.to_string()))?;
            if parsed.data.len() != batch.len() {
                return Err(EmbedError::BadResponse(format!(
                    "expected {} embeddings, got {}",
                    batch.len(),
                    parsed.data.len()
                )));
            }
            for row in parsed.data {
                let global = *batch.get(row.index).ok_or_else(|| {
                    EmbedError::BadResponse(format!("embedding index {} out of range", row.index))
                })?;
                if let Some(expected) = self.expected_dim {
                    if row.embedding.len() != expected {
                        return Err(EmbedError::DimMismatch { expected, got: row.embedding.len() });
                    }
                }
                if let Some(cache) = cache.as_ref() {
                    cache.put(&self.cache_key(texts[global]), &self.model, &row.embedding)?;
                }
                rows[global] = Some(row.embedding);
            }
        }

        let ids: Vec<String> = data.records.iter().map(|r| r.id.clone()).collect();
        let rows: Vec<Vec<f64>> = rows
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                r.ok_or_else(|| {
                    EmbedError::BadResponse(format!("no embedding returned for row {i}"))
                })
            })
            .collect::<Result<_, _>>()?;
        EmbeddingMatrix::from_rows(ids, rows, ProviderKind::Remote)
    }

    fn post_with_retry(
        &self,
        client: &reqwest::blocking::Client,
        url: &str,
        api_key: &str,
        body: &serde_json::Value,
    ) -> Result<reqwest::blocking::Response, EmbedError> {
        let mut request_ids = Vec::new();
        let mut last_status = 0u16;
        let attempts = self.max_retries.max(1);
        for attempt in 0..attempts {
            let response = client.post(url).bearer_auth(api_key).json(body).send()?;
            if response.status().is_success() {
                return Ok(response);
            }
            last_status = response.status().as_u16();
            if let Some(id) = response.headers().get("x-request-id") {
                request_ids.push(id.to_str().unwrap_or("<binary>").to_string());
            }
            if attempt + 1 < attempts {
                std::thread::sleep(std::time::Duration::from_millis(self.backoff_ms << attempt));
            }
        }
        Err(EmbedError::RemoteFailure { status: last_status, attempts, request_ids })
    }
}

/// Content-addressed embedding cache: one binary row file per text hash
/// plus a JSON manifest mapping hash to model and dimension.
struct EmbeddingCache {
    dir: PathBuf,
    manifest: std::cell::RefCell<BTreeMap<String, ManifestEntry>>,
}

#[derive(Serialize, Deserialize, Clone)]
struct ManifestEntry {
    model: String,
    dim: usize,
}

impl EmbeddingCache {
    fn open(dir: &Path) -> Result<EmbeddingCache, EmbedError> {
        std::fs::create_dir_all(dir)
            .map_err(|source| EmbedError::Cache { path: dir.to_path_buf(), source })?;
        let manifest_path = dir.join("manifest.json");
        let manifest = if manifest_path.exists() {
            let body = std::fs::read_to_string(&manifest_path)
                .map_err(|source| EmbedError::Cache { path: manifest_path.clone(), source })?;
            serde_json::from_str(&body).unwrap_or_default()
        } else {
            BTreeMap::new()
        };
        Ok(EmbeddingCache { dir: dir.to_path_buf(), manifest: std::cell::RefCell::new(manifest) })
    }

    fn row_path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.vec"))
    }

    fn get(&self, key: &str) -> Option<Vec<f64>> {
        let entry = self.manifest.borrow().get(key).cloned()?;
        let bytes = std::fs::read(self.row_path(key)).ok()?;
        if bytes.len() != entry.dim * 8 {
            return None;
        }
        Some(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
    }

    fn put(&self, key: &str, model: &str, row: &[f64]) -> Result<(), EmbedError> {
        let mut bytes = Vec::with_capacity(row.len() * 8);
        for v in row {
            bytes.extend_from_slice(&v.to_le_bytes());
        }
        let path = self.row_path(key);
        std::fs::write(&path, bytes).map_err(|source| EmbedError::Cache { path, source })?;
        self.manifest
            .borrow_mut()
            .insert(key.to_string(), ManifestEntry { model: model.to_string(), dim: row.len() });
        let manifest_path = self.dir.join("manifest.json");
        let body = serde_json::to_string_pretty(&*self.manifest.borrow()).expect("manifest json");
        std::fs::write(&manifest_path, body)
            .map_err(|source| EmbedError::Cache { path: manifest_path, source })
    }
}

/// Embedding provider selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EmbeddingProvider {
    Offline(OfflineProvider),
    Remote(RemoteProvider),
}

impl EmbeddingProvider {
    pub fn embed(&self, data: &Dataset) -> Result<EmbeddingMatrix, EmbedError> {
        match self {
            EmbeddingProvider::Offline(p) => p.embed(data),
            EmbeddingProvider::Remote(p) => p.embed(data),
        }
    }
}

/// How the similarity distribution is pooled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMode {
    /// All synthetic x real pairs.
    Pairwise,
    /// Per synthetic row, the cosine to its nearest real row.
    NearestReal,
}

/// Mean and population standard deviation of synthetic-to-real cosines
/// under the pairwise pooling mode.
pub fn cosine_distribution(
    synth: &EmbeddingMatrix,
    real: &EmbeddingMatrix,
) -> Result<(f64, f64), EmbedError> {
    cosine_distribution_mode(synth, real, SimilarityMode::Pairwise)
}

pub fn cosine_distribution_mode(
    synth: &EmbeddingMatrix,
    real: &EmbeddingMatrix,
    mode: SimilarityMode,
) -> Result<(f64, f64), EmbedError> {
    if synth.dim != real.dim {
        return Err(EmbedError::DimMismatch { expected: synth.dim, got: real.dim });
    }
    // Per-row partial sums are computed in parallel and reduced in row
    // order, keeping results independent of scheduling.
    let per_row: Vec<(f64, f64, usize)> = synth
        .vectors
        .par_iter()
        .map(|s| match mode {
            SimilarityMode::Pairwise => {
                let mut sum = 0.0;
                let mut sum_sq = 0.0;
                for r in &real.vectors {
                    let c = dot(s, r);
                    sum += c;
                    sum_sq += c * c;
                }
                (sum, sum_sq, real.len())
            }
            SimilarityMode::NearestReal => {
                let best = real.vectors.iter().map(|r| dot(s, r)).fold(f64::NEG_INFINITY, f64::max);
                (best, best * best, 1)
            }
        })
        .collect();
    let count: usize = per_row.iter().map(|&(_, _, n)| n).sum();
    let sum: f64 = per_row.iter().map(|&(s, _, _)| s).sum();
    let sum_sq: f64 = per_row.iter().map(|&(_, s, _)| s).sum();
    let n = count as f64;
    let mean = sum / n;
    let variance = (sum_sq / n - mean * mean).max(0.0);
    Ok((mean, variance.sqrt()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Similarity analytics for one synthetic dataset against the real corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub mean: f64,
    pub std: f64,
    pub topk_recall: f64,
    pub k: usize,
}

/// Average fraction of synthetic rows among each real row's `k` nearest
/// neighbors (cosine, ties broken by id). The candidate pool holds all
/// synthetic rows plus the other real rows.
pub fn topk_recall(
    synth: &EmbeddingMatrix,
    real: &EmbeddingMatrix,
    k: usize,
) -> Result<f64, EmbedError> {
    topk_recall_opts(synth, real, k, true)
}

/// [`topk_recall`] with an optional synthetic-only candidate pool.
pub fn topk_recall_opts(
    synth: &EmbeddingMatrix,
    real: &EmbeddingMatrix,
    k: usize,
    include_real_in_pool: bool,
) -> Result<f64, EmbedError> {
    if synth.dim != real.dim {
        return Err(EmbedError::DimMismatch { expected: synth.dim, got: real.dim });
    }
    let pool = if include_real_in_pool { synth.len() + real.len() - 1 } else { synth.len() };
    if pool < k || k == 0 {
        return Err(EmbedError::PoolTooSmall { pool, k });
    }

    let per_row: Vec<f64> = (0..real.len())
        .into_par_iter()
        .map(|target| {
            let target_row = &real.vectors[target];
            let mut candidates: Vec<(f64, &str, bool)> = Vec::with_capacity(pool);
            for (i, row) in synth.vectors.iter().enumerate() {
                candidates.push((dot(target_row, row), synth.ids[i].as_str(), true));
            }
            if include_real_in_pool {
                for (i, row) in real.vectors.iter().enumerate() {
                    if i != target {
                        candidates.push((dot(target_row, row), real.ids[i].as_str(), false));
                    }
                }
            }
            candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
            let synthetic_hits = candidates[..k].iter().filter(|c| c.2).count();
            synthetic_hits as f64 / k as f64
        })
        .collect();
    Ok(per_row.iter().sum::<f64>() / real.len() as f64)
}
