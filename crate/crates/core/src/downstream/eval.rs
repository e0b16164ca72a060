//! Classifier evaluation on the two-test-set protocol: precision, recall,
//! and F1 on the balanced disclosed set (T1, sponsored as the positive
//! class), prediction-rate accuracy on the undisclosed-only set (T2).

use crate::dataset::{Dataset, Label};
use serde::{Deserialize, Serialize};
use std::path::Path;

use super::logreg::LogRegModel;
use super::tfidf::TfidfModel;
use super::DownstreamError;

/// Evaluation scores for one training dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub dataset_name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// T2 accuracy; absent when no undisclosed test set was supplied.
    pub accuracy: Option<f64>,
}

/// Scores `model` on T1 (precision/recall/F1) and, when given, on T2
/// (accuracy = fraction predicted sponsored; T2 must contain only
/// sponsored records).
pub fn evaluate(
    model: &LogRegModel,
    tfidf: &TfidfModel,
    t1: &Dataset,
    t2: Option<&Dataset>,
) -> Result<EvalResult, DownstreamError> {
    if t1.is_empty() {
        return Err(DownstreamError::EmptyDataset);
    }
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for rec in &t1.records {
        let predicted = model.predict(&tfidf.transform_text(&rec.text));
        let actual = rec.label == Label::Sponsored;
        match (predicted, actual) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = ratio(tp, tp + fp);
    let recall = ratio(tp, tp + fn_);
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };

    let accuracy = match t2 {
        None => None,
        Some(t2) => {
            if let Some(bad) = t2.records.iter().find(|r| r.label != Label::Sponsored) {
                return Err(DownstreamError::NonSponsoredInT2 { id: bad.id.clone() });
            }
            if t2.is_empty() {
                return Err(DownstreamError::EmptyDataset);
            }
            let hits =
                t2.records.iter().filter(|r| model.predict(&tfidf.transform_text(&r.text))).count();
            Some(hits as f64 / t2.len() as f64)
        }
    };

    Ok(EvalResult { dataset_name: String::new(), precision, recall, f1, accuracy })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// A fitted TF-IDF vocabulary paired with its classifier, serializable to
/// JSON for audit reproducibility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedClassifier {
    pub tfidf: TfidfModel,
    pub model: LogRegModel,
}

impl TrainedClassifier {
    pub fn save(&self, path: &Path) -> Result<(), DownstreamError> {
        let body = serde_json::to_string_pretty(self).expect("classifier json");
        std::fs::write(path, body)
            .map_err(|source| DownstreamError::Io { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<TrainedClassifier, DownstreamError> {
        let body = std::fs::read_to_string(path)
            .map_err(|source| DownstreamError::Io { path: path.to_path_buf(), source })?;
        serde_json::from_str(&body).map_err(|e| DownstreamError::BadModelFile {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })
    }
}
