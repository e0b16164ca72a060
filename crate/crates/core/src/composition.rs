//! Per-dataset caption composition statistics: caption length, hashtag,
//! user-tag, and emoji usage, with corpus-global unique-entity counts.

use crate::dataset::Dataset;
use crate::textfeat::{self, EmojiOccurrence};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use thiserror::Error;

/// Composition statistics for one dataset. Means and standard deviations
/// are over per-caption values; unique counts are corpus-global over
/// case-folded entities, with emoji uniqueness over (base, tone) pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionReport {
    pub length_mean: f64,
    pub length_std: f64,
    pub max_length: u64,
    pub hashtags_mean: f64,
    pub hashtags_std: f64,
    pub hashtags_unique: u64,
    pub usertags_mean: f64,
    pub usertags_std: f64,
    pub usertags_unique: u64,
    pub emojis_mean: f64,
    pub emojis_std: f64,
    pub emojis_unique: u64,
}

/// Field-wise average of composition reports, used when the real-side row
/// is bootstrapped over resamples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositionAverage {
    pub length_mean: f64,
    pub length_std: f64,
    pub max_length: f64,
    pub hashtags_mean: f64,
    pub hashtags_std: f64,
    pub hashtags_unique: f64,
    pub usertags_mean: f64,
    pub usertags_std: f64,
    pub usertags_unique: f64,
    pub emojis_mean: f64,
    pub emojis_std: f64,
    pub emojis_unique: f64,
}

impl CompositionAverage {
    pub fn of(reports: &[CompositionReport]) -> CompositionAverage {
        assert!(!reports.is_empty(), "average of zero reports");
        let n = reports.len() as f64;
        let avg = |f: fn(&CompositionReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        CompositionAverage {
            length_mean: avg(|r| r.length_mean),
            length_std: avg(|r| r.length_std),
            max_length: avg(|r| r.max_length as f64),
            hashtags_mean: avg(|r| r.hashtags_mean),
            hashtags_std: avg(|r| r.hashtags_std),
            hashtags_unique: avg(|r| r.hashtags_unique as f64),
            usertags_mean: avg(|r| r.usertags_mean),
            usertags_std: avg(|r| r.usertags_std),
            usertags_unique: avg(|r| r.usertags_unique as f64),
            emojis_mean: avg(|r| r.emojis_mean),
            emojis_std: avg(|r| r.emojis_std),
            emojis_unique: avg(|r| r.emojis_unique as f64),
        }
    }

    pub fn of_single(report: &CompositionReport) -> CompositionAverage {
        CompositionAverage::of(std::slice::from_ref(report))
    }
}

#[derive(Debug, Error)]
pub enum CompositionError {
    #[error("composition of empty dataset")]
    EmptyDataset,
}

/// Mean and sample standard deviation (n-1 denominator; 0 when n < 2).
/// Values are sorted before accumulation so results do not depend on
/// record order.
fn mean_std(values: &[f64]) -> (f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    if sorted.len() < 2 {
        return (mean, 0.0);
    }
    let ssd = sorted.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ssd / (n - 1.0)).sqrt())
}

/// Computes composition statistics over a non-empty dataset.
pub fn composition(data: &Dataset) -> Result<CompositionReport, CompositionError> {
    if data.is_empty() {
        return Err(CompositionError::EmptyDataset);
    }
    let mut lengths = Vec::with_capacity(data.len());
    let mut hashtag_counts = Vec::with_capacity(data.len());
    let mut usertag_counts = Vec::with_capacity(data.len());
    let mut emoji_counts = Vec::with_capacity(data.len());
    let mut unique_hashtags: HashSet<String> = HashSet::new();
    let mut unique_usertags: HashSet<String> = HashSet::new();
    let mut unique_emojis: HashSet<EmojiOccurrence> = HashSet::new();
    let mut max_length = 0u64;

    for text in data.texts() {
        let bundle = textfeat::parse(text);
        lengths.push(bundle.token_count as f64);
        max_length = max_length.max(bundle.token_count as u64);
        hashtag_counts.push(bundle.hashtags.len() as f64);
        usertag_counts.push(bundle.usertags.len() as f64);
        emoji_counts.push(bundle.emojis.len() as f64);
        unique_hashtags.extend(bundle.hashtags);
        unique_usertags.extend(bundle.usertags);
        unique_emojis.extend(bundle.emojis);
    }

    let (length_mean, length_std) = mean_std(&lengths);
    let (hashtags_mean, hashtags_std) = mean_std(&hashtag_counts);
    let (usertags_mean, usertags_std) = mean_std(&usertag_counts);
    let (emojis_mean, emojis_std) = mean_std(&emoji_counts);

    Ok(CompositionReport {
        length_mean,
        length_std,
        max_length,
        hashtags_mean,
        hashtags_std,
        hashtags_unique: unique_hashtags.len() as u64,
        usertags_mean,
        usertags_std,
        usertags_unique: unique_usertags.len() as u64,
        emojis_mean,
        emojis_std,
        emojis_unique: unique_emojis.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{CaptionRecord, Label, Source};

    fn dataset(texts: &[&str]) -> Dataset {
        let records = texts
            .iter()
            .enumerate()
            .map(|(i, t)| CaptionRecord {
                id: format!("r{i}"),
                text: t.to_string(),
                label: Label::Nonsponsored,
                source: Source::Real,
                strategy: None,
                shortcode: None,
            })
            .collect();
        Dataset::new("t", records).unwrap()
    }

    #[test]
    fn mean_and_sample_std_of_two_lengths() {
        // Hand computation: mean (10+20)/2 = 15, sample variance
        // ((10-15)^2 + (20-15)^2)/(2-1) = 50, std = sqrt(50).
        let d = dataset(&["w ".repeat(10).trim(), "w ".repeat(20).trim()]);
        let r = composition(&d).unwrap();
        assert_eq!(r.length_mean, 15.0);
        assert!((r.length_std - 7.071_067_811_865_475).abs() < 1e-9);
        assert_eq!(r.max_length, 20);
    }

    #[test]
    fn duplicate_tag_counts_twice_unique_once() {
        let d = dataset(&["hi #a #a"]);
        let r = composition(&d).unwrap();
        assert_eq!(r.hashtags_mean, 2.0);
        assert_eq!(r.hashtags_unique, 1);
        assert_eq!(r.hashtags_std, 0.0);
    }

    #[test]
    fn identical_captions_zero_stds() {
        let d = dataset(&["same #x @y 😍 text"; 6]);
        let r = composition(&d).unwrap();
        assert_eq!(r.length_std, 0.0);
        assert_eq!(r.hashtags_std, 0.0);
        assert_eq!(r.usertags_std, 0.0);
        assert_eq!(r.emojis_std, 0.0);
    }

    #[test]
    fn emoji_uniqueness_distinguishes_tone() {
        let d = dataset(&["👍🏻 👍🏿 👍🏿"]);
        let r = composition(&d).unwrap();
        assert_eq!(r.emojis_mean, 3.0);
        assert_eq!(r.emojis_unique, 2);
    }

    #[test]
    fn permutation_invariance() {
        let texts = ["a #b @c", "d d d #e 😍", "#f #g", "h", "i @j.k 👍🏽"];
        let d1 = dataset(&texts);
        let mut rev = texts;
        rev.reverse();
        let d2 = dataset(&rev);
        assert_eq!(composition(&d1).unwrap(), composition(&d2).unwrap());
    }

    #[test]
    fn unique_counts_monotone_under_union() {
        let a = dataset(&["#x #y", "#z"]);
        let mut records = a.records.clone();
        records.push(CaptionRecord {
            id: "extra".into(),
            text: "#w #x".into(),
            label: Label::Nonsponsored,
            source: Source::Real,
            strategy: None,
            shortcode: None,
        });
        let b = Dataset::new("u", records).unwrap();
        assert!(
            composition(&b).unwrap().hashtags_unique >= composition(&a).unwrap().hashtags_unique
        );
    }

    #[test]
    fn empty_dataset_is_an_error() {
        let d = Dataset::new("e", vec![]).unwrap();
        assert!(matches!(composition(&d), Err(CompositionError::EmptyDataset)));
    }

    #[test]
    fn average_of_reports() {
        let a = composition(&dataset(&["one two", "three"])).unwrap();
        let b = composition(&dataset(&["#t four five six"])).unwrap();
        let avg = CompositionAverage::of(&[a.clone(), b.clone()]);
        assert!((avg.length_mean - (a.length_mean + b.length_mean) / 2.0).abs() < 1e-12);
        assert!(
            (avg.hashtags_unique - (a.hashtags_unique + b.hashtags_unique) as f64 / 2.0).abs()
                < 1e-12
        );
    }
}
