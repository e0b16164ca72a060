//! Unigram TF-IDF featurization with smoothed idf and L2 document norms.

use crate::dataset::Dataset;
use crate::textfeat;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

use super::DownstreamError;

/// Fitted TF-IDF vocabulary. Indices are dense `0..V-1`, assigned in
/// lexicographic token order so fitting is deterministic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfModel {
    pub vocabulary: BTreeMap<String, usize>,
    pub idf: Vec<f64>,
    pub doc_count: usize,
}

/// Sparse row-major feature matrix: per row, (column, weight) pairs in
/// ascending column order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub rows: Vec<Vec<(u32, f64)>>,
    pub n_cols: usize,
}

/// Unigram tokens of one text under the shared normalization rules
/// (case-fold, punctuation strip, keep stopwords).
pub fn unigrams(text: &str) -> Vec<String> {
    let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    textfeat::normalize_tokens(&tokens, false)
}

impl TfidfModel {
    /// Fits the vocabulary and idf weights on training documents only:
    /// `idf = ln((1 + N) / (1 + df)) + 1`.
    pub fn fit(train: &Dataset) -> Result<TfidfModel, DownstreamError> {
        if train.is_empty() {
            return Err(DownstreamError::EmptyDataset);
        }
        let mut df: BTreeMap<String, usize> = BTreeMap::new();
        for text in train.texts() {
            let mut seen: Vec<String> = unigrams(text);
            seen.sort();
            seen.dedup();
            for token in seen {
                *df.entry(token).or_insert(0) += 1;
            }
        }
        if df.is_empty() {
            return Err(DownstreamError::EmptyVocabulary);
        }
        let doc_count = train.len();
        let mut vocabulary = BTreeMap::new();
        let mut idf = Vec::with_capacity(df.len());
        for (col, (token, count)) in df.into_iter().enumerate() {
            vocabulary.insert(token, col);
            idf.push(((1.0 + doc_count as f64) / (1.0 + count as f64)).ln() + 1.0);
        }
        Ok(TfidfModel { vocabulary, idf, doc_count })
    }

    pub fn n_features(&self) -> usize {
        self.idf.len()
    }

    /// Transforms one text into an L2-normalized sparse row. Tokens outside
    /// the vocabulary contribute nothing.
    pub fn transform_text(&self, text: &str) -> Vec<(u32, f64)> {
        let mut counts: BTreeMap<u32, f64> = BTreeMap::new();
        for token in unigrams(text) {
            if let Some(&col) = self.vocabulary.get(&token) {
                *counts.entry(col as u32).or_insert(0.0) += 1.0;
            }
        }
        let mut row: Vec<(u32, f64)> =
            counts.into_iter().map(|(col, tf)| (col, tf * self.idf[col as usize])).collect();
        let norm = row.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in &mut row {
                *w /= norm;
            }
        }
        row
    }

    pub fn transform(&self, data: &Dataset) -> FeatureMatrix {
        FeatureMatrix {
            rows: data.texts().map(|t| self.transform_text(t)).collect(),
            n_cols: self.n_features(),
        }
    }
}
