//! Caption corpus ingestion, sampling, and bootstrapped resampling.
//!
//! Datasets are immutable after load. Bootstrap resampling draws samples
//! with replacement, evaluates a metric per resample (in parallel, reduced
//! in resample-index order), and reports a percentile confidence interval.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Sponsored-content label of a caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Sponsored,
    Nonsponsored,
}

/// Whether a caption comes from a real corpus or was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Real,
    Synthetic,
}

/// Prompt strategy that produced a synthetic caption.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Base,
    FixedExamples,
    RandomExamples,
    Imitation,
}

impl Strategy {
    pub const ALL: [Strategy; 4] =
        [Strategy::Base, Strategy::FixedExamples, Strategy::RandomExamples, Strategy::Imitation];

    pub fn as_str(&self) -> &'static str {
        match self {
            Strategy::Base => "base",
            Strategy::FixedExamples => "fixed_examples",
            Strategy::RandomExamples => "random_examples",
            Strategy::Imitation => "imitation",
        }
    }

    /// Human-readable name used as a table row/column label.
    pub fn display_name(&self) -> &'static str {
        match self {
            Strategy::Base => "Base Prompt",
            Strategy::FixedExamples => "Fixed Examples",
            Strategy::RandomExamples => "Random Examples",
            Strategy::Imitation => "Imitation",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One caption with its label and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptionRecord {
    pub id: String,
    pub text: String,
    pub label: Label,
    pub source: Source,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<Strategy>,
    /// Opaque pointer to the originating real post, carried as metadata only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shortcode: Option<String>,
}

impl CaptionRecord {
    /// Checks the record-level invariants: non-blank text, and a strategy
    /// tag present exactly when the source is synthetic.
    pub fn validate(&self) -> Result<(), String> {
        if self.text.trim().is_empty() {
            return Err(format!("record {:?}: text is empty after trimming", self.id));
        }
        match (self.source, self.strategy) {
            (Source::Synthetic, None) => {
                Err(format!("record {:?}: synthetic record without strategy", self.id))
            }
            (Source::Real, Some(_)) => {
                Err(format!("record {:?}: real record carries a strategy tag", self.id))
            }
            _ => Ok(()),
        }
    }
}

/// An ordered, immutable collection of caption records with unique ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub records: Vec<CaptionRecord>,
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: duplicate id {id:?}")]
    DuplicateId { line: usize, id: String },
    #[error("invalid record: {0}")]
    InvalidRecord(String),
    #[error("duplicate id {0:?}")]
    DuplicateRecordId(String),
    #[error("sample size {n} exceeds dataset size {len}")]
    SampleTooLarge { n: usize, len: usize },
    #[error("bootstrap sample_size {n} exceeds 10x dataset size {len}")]
    OversampleCap { n: usize, len: usize },
    #[error("bootstrap requires at least 2 resamples, got {0}")]
    TooFewResamples(usize),
    #[error("bootstrap of empty dataset")]
    EmptyDataset,
    #[error("metric {name:?} returned non-finite value on resample {index}")]
    NonFiniteMetric { name: String, index: usize },
}

impl Dataset {
    /// Builds a dataset, enforcing id uniqueness and per-record invariants.
    pub fn new(name: impl Into<String>, records: Vec<CaptionRecord>) -> Result<Self, DatasetError> {
        let mut seen = HashSet::with_capacity(records.len());
        for rec in &records {
            rec.validate().map_err(DatasetError::InvalidRecord)?;
            if !seen.insert(rec.id.as_str()) {
                return Err(DatasetError::DuplicateRecordId(rec.id.clone()));
            }
        }
        Ok(Dataset { name: name.into(), records })
    }

    /// Internal constructor for resampled multisets, where repeated ids are
    /// expected.
    pub(crate) fn from_records_unchecked(
        name: impl Into<String>,
        records: Vec<CaptionRecord>,
    ) -> Self {
        Dataset { name: name.into(), records }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn texts(&self) -> impl Iterator<Item = &str> {
        self.records.iter().map(|r| r.text.as_str())
    }

    /// Multiset sample with replacement. Ids may repeat in the result.
    pub fn resample(&self, n: usize, rng: &mut impl Rng) -> Dataset {
        let records =
            (0..n).map(|_| self.records[rng.random_range(0..self.records.len())].clone()).collect();
        Dataset::from_records_unchecked(format!("{}:resample", self.name), records)
    }

    /// Writes the dataset as JSONL, one record per line, loadable by
    /// [`load_jsonl`].
    pub fn write_jsonl(&self, path: &Path) -> Result<(), DatasetError> {
        let io_err = |source| DatasetError::Io { path: path.to_path_buf(), source };
        let file = std::fs::File::create(path).map_err(io_err)?;
        let mut w = std::io::BufWriter::new(file);
        for rec in &self.records {
            let line = serde_json::to_string(rec).expect("record serialization");
            writeln!(w, "{line}")
                .map_err(|e| DatasetError::Io { path: path.to_path_buf(), source: e })?;
        }
        w.flush().map_err(|e| DatasetError::Io { path: path.to_path_buf(), source: e })
    }
}

/// Loads a JSONL dataset: one JSON object per line, UTF-8, file order kept.
pub fn load_jsonl(path: &Path) -> Result<Dataset, DatasetError> {
    let file = std::fs::File::open(path)
        .map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    let reader = BufReader::new(file);
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());

    let mut records = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: CaptionRecord = serde_json::from_str(&line)
            .map_err(|e| DatasetError::Malformed { line: line_no, msg: e.to_string() })?;
        rec.validate().map_err(|msg| DatasetError::Malformed { line: line_no, msg })?;
        if !seen.insert(rec.id.clone()) {
            return Err(DatasetError::DuplicateId { line: line_no, id: rec.id });
        }
        records.push(rec);
    }
    Ok(Dataset { name, records })
}

/// Deterministic sample of `n` records without replacement. The result
/// preserves the original record order.
pub fn fixed_sample(data: &Dataset, n: usize, seed: u64) -> Result<Dataset, DatasetError> {
    if n > data.len() {
        return Err(DatasetError::SampleTooLarge { n, len: data.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chosen = rand::seq::index::sample(&mut rng, data.len(), n).into_vec();
    chosen.sort_unstable();
    let records = chosen.into_iter().map(|i| data.records[i].clone()).collect();
    Ok(Dataset::from_records_unchecked(format!("{}:sample{}", data.name, n), records))
}

/// Distribution summary of a metric over bootstrap resamples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSummary {
    pub metric_name: String,
    pub per_resample_values: Vec<f64>,
    pub mean: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub confidence: f64,
    pub resamples: usize,
    pub sample_size: usize,
}

impl BootstrapSummary {
    /// Summarizes pre-computed per-resample values with a percentile CI.
    ///
    /// The interval is widened to contain the mean, so the
    /// `ci_low <= mean <= ci_high` invariant holds even on extreme value
    /// distributions.
    pub fn from_values(
        metric_name: impl Into<String>,
        values: Vec<f64>,
        confidence: f64,
        sample_size: usize,
    ) -> Self {
        assert!(!values.is_empty(), "summary of zero resamples");
        assert!(confidence > 0.0 && confidence < 1.0, "confidence must be in (0,1)");
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut sorted = values.clone();
        sorted.sort_by(f64::total_cmp);
        let alpha = 1.0 - confidence;
        let k = ((alpha / 2.0 * n as f64).ceil() as usize).max(1);
        let ci_low = sorted[k - 1].min(mean);
        let ci_high = sorted[n - k].max(mean);
        BootstrapSummary {
            metric_name: metric_name.into(),
            per_resample_values: values,
            mean,
            ci_low,
            ci_high,
            confidence,
            resamples: n,
            sample_size,
        }
    }
}

/// Bootstrap parameters shared across experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub sample_size: usize,
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
}

impl BootstrapConfig {
    pub fn new(sample_size: usize, resamples: usize, seed: u64) -> Self {
        BootstrapConfig { sample_size, resamples, confidence: 0.95, seed }
    }
}

/// Draws `resamples` samples of `sample_size` records with replacement,
/// applies `metric` to each, and summarizes with a percentile CI.
///
/// Deterministic given the seed: resample index vectors are drawn
/// sequentially from one seeded generator, then metrics are evaluated in
/// parallel and reduced in resample-index order.
pub fn bootstrap<F>(
    data: &Dataset,
    cfg: &BootstrapConfig,
    metric_name: &str,
    metric: F,
) -> Result<BootstrapSummary, DatasetError>
where
    F: Fn(&Dataset) -> f64 + Sync,
{
    if data.is_empty() {
        return Err(DatasetError::EmptyDataset);
    }
    if cfg.resamples < 2 {
        return Err(DatasetError::TooFewResamples(cfg.resamples));
    }
    // Oversampling (with replacement) is allowed, but capped to catch
    // misconfigured sample sizes.
    if cfg.sample_size > 10 * data.len() {
        return Err(DatasetError::OversampleCap { n: cfg.sample_size, len: data.len() });
    }

    let index_sets = resample_indices(data.len(), cfg);
    let values: Vec<f64> = index_sets
        .par_iter()
        .map(|indices| {
            let records = indices.iter().map(|&i| data.records[i].clone()).collect();
            let sample = Dataset::from_records_unchecked(format!("{}:boot", data.name), records);
            metric(&sample)
        })
        .collect();

    for (index, v) in values.iter().enumerate() {
        if !v.is_finite() {
            return Err(DatasetError::NonFiniteMetric { name: metric_name.to_string(), index });
        }
    }
    Ok(BootstrapSummary::from_values(metric_name, values, cfg.confidence, cfg.sample_size))
}

/// Draws the index vectors for every resample from one seeded generator.
/// Shared by [`bootstrap`] and callers that evaluate several metrics over
/// the same resample realizations.
pub fn resample_indices(len: usize, cfg: &BootstrapConfig) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.resamples)
        .map(|_| (0..cfg.sample_size).map(|_| rng.random_range(0..len)).collect())
        .collect()
}

/// Evaluates `f` on every bootstrap resample of `data`, in parallel,
/// reduced in resample-index order. For report-shaped metrics that the
/// scalar [`bootstrap`] summary does not fit.
pub fn bootstrap_map<T: Send>(
    data: &Dataset,
    cfg: &BootstrapConfig,
    f: impl Fn(&Dataset) -> T + Sync,
) -> Vec<T> {
    let index_sets = resample_indices(data.len(), cfg);
    index_sets
        .par_iter()
        .map(|indices| {
            let records = indices.iter().map(|&i| data.records[i].clone()).collect();
            f(&Dataset::from_records_unchecked(format!("{}:boot", data.name), records))
        })
        .collect()
}
