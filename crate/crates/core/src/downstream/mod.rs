//! Utility evaluation of synthetic captions: TF-IDF featurization, a
//! from-scratch logistic-regression classifier, the two-test-set evaluation
//! protocol, merge (augmentation) experiments, and vocabulary-overlap
//! diagnostics.

mod eval;
mod logreg;
mod tfidf;

pub use eval::{evaluate, EvalResult, TrainedClassifier};
pub use logreg::{logreg_gradient, logreg_objective, train_logreg, LogRegModel, TrainConfig};
pub use tfidf::{unigrams, FeatureMatrix, TfidfModel};

use crate::dataset::{BootstrapSummary, Dataset, Label};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DownstreamError {
    #[error("operation requires a non-empty dataset")]
    EmptyDataset,
    #[error("training corpus yields an empty vocabulary")]
    EmptyVocabulary,
    #[error("training labels contain a single class")]
    SingleClass,
    #[error("loss became non-finite at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },
    #[error("T2 must contain only sponsored records, found {id:?}")]
    NonSponsoredInT2 { id: String },
    #[error("resample {index} failed: {msg}")]
    ResampleFailed { index: usize, msg: String },
    #[error("metric {name:?} was non-finite on resample {index}")]
    NonFiniteMetric { name: String, index: usize },
    #[error("io error at {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot read model file {path}: {msg}")]
    BadModelFile { path: PathBuf, msg: String },
}

/// Binary targets for a dataset, sponsored as the positive class.
pub fn targets(data: &Dataset) -> Vec<f64> {
    data.records.iter().map(|r| (r.label == Label::Sponsored) as u8 as f64).collect()
}

/// Fits TF-IDF and the classifier on `train` and scores the result.
pub fn train_and_evaluate(
    train: &Dataset,
    t1: &Dataset,
    t2: Option<&Dataset>,
    cfg: &TrainConfig,
) -> Result<EvalResult, DownstreamError> {
    let tfidf = TfidfModel::fit(train)?;
    let x = tfidf.transform(train);
    let model = train_logreg(&x, &targets(train), cfg)?;
    let mut result = evaluate(&model, &tfidf, t1, t2)?;
    result.dataset_name = train.name.clone();
    Ok(result)
}

/// Percentage of unique test-set unigrams that also occur in the training
/// corpus (the denominator is the test vocabulary).
pub fn vocab_overlap(train: &Dataset, test_subset: &Dataset) -> Result<f64, DownstreamError> {
    if train.is_empty() || test_subset.is_empty() {
        return Err(DownstreamError::EmptyDataset);
    }
    let vocab = |d: &Dataset| -> BTreeSet<String> { d.texts().flat_map(unigrams).collect() };
    let train_vocab = vocab(train);
    let test_vocab = vocab(test_subset);
    if test_vocab.is_empty() {
        return Ok(0.0);
    }
    let shared = test_vocab.iter().filter(|t| train_vocab.contains(*t)).count();
    Ok(100.0 * shared as f64 / test_vocab.len() as f64)
}

/// Configuration of one augmentation arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentConfig {
    /// Real records drawn (with replacement) per resample.
    pub sample_size: usize,
    pub resamples: usize,
    pub confidence: f64,
    pub seed: u64,
    pub train: TrainConfig,
}

impl AugmentConfig {
    pub fn new(seed: u64) -> Self {
        AugmentConfig {
            sample_size: 1000,
            resamples: 100,
            confidence: 0.95,
            seed,
            train: TrainConfig::default(),
        }
    }
}

/// Bootstrap summaries of every evaluation metric for one arm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentSummary {
    pub arm: String,
    pub precision: BootstrapSummary,
    pub recall: BootstrapSummary,
    pub f1: BootstrapSummary,
    pub accuracy: Option<BootstrapSummary>,
}

/// Runs the merge experiment: per resample, `sample_size` real records are
/// drawn with replacement, unioned with the full synthetic dataset (when
/// given), and a fresh classifier is trained and scored. With `synth =
/// None` this is the real-only control arm. Per-resample seeds derive from
/// `seed + index`; resamples run in parallel and reduce in index order.
pub fn augment_experiment(
    synth: Option<&Dataset>,
    real: &Dataset,
    t1: &Dataset,
    t2: Option<&Dataset>,
    cfg: &AugmentConfig,
) -> Result<AugmentSummary, DownstreamError> {
    if real.is_empty() {
        return Err(DownstreamError::EmptyDataset);
    }
    let arm = match synth {
        Some(s) => format!("real({})+{}", cfg.sample_size, s.name),
        None => format!("real({})", cfg.sample_size),
    };

    let results: Vec<Result<EvalResult, DownstreamError>> = (0..cfg.resamples)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(index as u64));
            let mut records = real.resample(cfg.sample_size, &mut rng).records;
            if let Some(synth) = synth {
                records.extend(synth.records.iter().cloned());
            }
            let train = Dataset::from_records_unchecked(format!("{arm}:{index}"), records);
            train_and_evaluate(&train, t1, t2, &cfg.train)
                .map_err(|e| DownstreamError::ResampleFailed { index, msg: e.to_string() })
        })
        .collect();

    let mut precision = Vec::with_capacity(cfg.resamples);
    let mut recall = Vec::with_capacity(cfg.resamples);
    let mut f1 = Vec::with_capacity(cfg.resamples);
    let mut accuracy = Vec::with_capacity(cfg.resamples);
    for (index, result) in results.into_iter().enumerate() {
        let r = result?;
        for (name, value) in [("precision", r.precision), ("recall", r.recall), ("f1", r.f1)] {
            if !value.is_finite() {
                return Err(DownstreamError::NonFiniteMetric { name: name.to_string(), index });
            }
        }
        precision.push(r.precision);
        recall.push(r.recall);
        f1.push(r.f1);
        if let Some(acc) = r.accuracy {
            accuracy.push(acc);
        }
    }

    let summarize = |name: &str, values: Vec<f64>| {
        BootstrapSummary::from_values(
            format!("{arm}:{name}"),
            values,
            cfg.confidence,
            cfg.sample_size,
        )
    };
    Ok(AugmentSummary {
        precision: summarize("precision", precision),
        recall: summarize("recall", recall),
        f1: summarize("f1", f1),
        accuracy: if accuracy.is_empty() { None } else { Some(summarize("accuracy", accuracy)) },
        arm,
    })
}
