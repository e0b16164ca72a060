//! Content-level comparison between a synthetic and a real corpus: tag
//! overlap, Jaccard n-gram similarity, top-k entity overlap, missing/extra
//! entity diffs, emoji skin-tone distributions, and caption uniqueness.

use crate::dataset::Dataset;
use crate::textfeat::{self, SkinTone};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

/// Entity families that overlap and diff metrics operate on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntityKind {
    Hashtag,
    Usertag,
    Ngram1,
    Ngram2,
    Ngram3,
    Emoji,
}

impl EntityKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EntityKind::Hashtag => "hashtag",
            EntityKind::Usertag => "usertag",
            EntityKind::Ngram1 => "ngram1",
            EntityKind::Ngram2 => "ngram2",
            EntityKind::Ngram3 => "ngram3",
            EntityKind::Emoji => "emoji",
        }
    }
}

/// Tag families for directional overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TagKind {
    Hashtag,
    Usertag,
}

#[derive(Debug, Error)]
pub enum ContentError {
    #[error("operation requires a non-empty dataset: {0}")]
    EmptyDataset(String),
    #[error("jaccard undefined: both {n}-gram sets are empty")]
    EmptyGramSets { n: usize },
}

/// Occurrence counts per entity, every occurrence counted (n-grams count
/// every window over the normalized token sequence).
pub fn entity_counts(data: &Dataset, kind: EntityKind) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for text in data.texts() {
        let bundle = textfeat::parse(text);
        match kind {
            EntityKind::Hashtag => {
                for tag in bundle.hashtags {
                    *counts.entry(tag).or_insert(0) += 1;
                }
            }
            EntityKind::Usertag => {
                for tag in bundle.usertags {
                    *counts.entry(tag).or_insert(0) += 1;
                }
            }
            EntityKind::Emoji => {
                for emoji in &bundle.emojis {
                    *counts.entry(emoji.reconstruct()).or_insert(0) += 1;
                }
            }
            EntityKind::Ngram1 | EntityKind::Ngram2 | EntityKind::Ngram3 => {
                let n = ngram_order(kind);
                let cleaned = textfeat::normalize_tokens(&bundle.tokens, true);
                for window in cleaned.windows(n) {
                    *counts.entry(window.join(" ")).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

fn ngram_order(kind: EntityKind) -> usize {
    match kind {
        EntityKind::Ngram1 => 1,
        EntityKind::Ngram2 => 2,
        EntityKind::Ngram3 => 3,
        _ => unreachable!("not an n-gram kind"),
    }
}

fn entity_set(data: &Dataset, kind: EntityKind) -> BTreeSet<String> {
    entity_counts(data, kind).into_keys().collect()
}

/// Directional tag overlap with the synthetic unique set as denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TagOverlap {
    pub pct: f64,
    /// Set when the synthetic corpus has no entities of the kind; the
    /// overlap is then reported as 0.
    pub synth_empty: bool,
}

/// Share of unique synthetic tags that also occur in the real corpus,
/// as a percentage of the synthetic unique set.
pub fn tag_overlap(
    synth: &Dataset,
    real: &Dataset,
    kind: TagKind,
) -> Result<TagOverlap, ContentError> {
    require_non_empty(synth)?;
    require_non_empty(real)?;
    let entity = match kind {
        TagKind::Hashtag => EntityKind::Hashtag,
        TagKind::Usertag => EntityKind::Usertag,
    };
    let synth_set = entity_set(synth, entity);
    if synth_set.is_empty() {
        return Ok(TagOverlap { pct: 0.0, synth_empty: true });
    }
    let real_set = entity_set(real, entity);
    let shared = synth_set.iter().filter(|t| real_set.contains(*t)).count();
    Ok(TagOverlap { pct: 100.0 * shared as f64 / synth_set.len() as f64, synth_empty: false })
}

/// Jaccard similarity |A∩B|/|A∪B| over corpus-global normalized n-gram sets.
pub fn jaccard_ngrams(synth: &Dataset, real: &Dataset, n: usize) -> Result<f64, ContentError> {
    require_non_empty(synth)?;
    require_non_empty(real)?;
    let kind = match n {
        1 => EntityKind::Ngram1,
        2 => EntityKind::Ngram2,
        3 => EntityKind::Ngram3,
        _ => panic!("n-gram order must be in 1..=3, got {n}"),
    };
    let a = entity_set(synth, kind);
    let b = entity_set(real, kind);
    let intersection = a.intersection(&b).count();
    let union = a.len() + b.len() - intersection;
    if union == 0 {
        return Err(ContentError::EmptyGramSets { n });
    }
    Ok(intersection as f64 / union as f64)
}

/// Overlap of the top-k most frequent entities of each corpus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopkOverlap {
    pub pct: f64,
    /// k actually used after clamping to the smaller unique-entity count.
    pub k: usize,
    pub clamped: bool,
}

/// Ranks entities by frequency (ties broken lexicographically) and reports
/// `100 * |topK(synth) ∩ topK(real)| / k`. When either corpus has fewer
/// than `k` unique entities, k is clamped and the result flagged.
pub fn topk_overlap(
    synth: &Dataset,
    real: &Dataset,
    kind: EntityKind,
    k: usize,
) -> Result<TopkOverlap, ContentError> {
    require_non_empty(synth)?;
    require_non_empty(real)?;
    let synth_counts = entity_counts(synth, kind);
    let real_counts = entity_counts(real, kind);
    let k_used = k.min(synth_counts.len()).min(real_counts.len());
    let clamped = k_used < k;
    if k_used == 0 {
        return Ok(TopkOverlap { pct: 0.0, k: 0, clamped: true });
    }
    let top_synth = top_entities(&synth_counts, k_used);
    let top_real: BTreeSet<&String> = top_entities(&real_counts, k_used).into_iter().collect();
    let shared = top_synth.iter().filter(|e| top_real.contains(*e)).count();
    Ok(TopkOverlap { pct: 100.0 * shared as f64 / k_used as f64, k: k_used, clamped })
}

/// Top-k entities by descending frequency, ascending label on ties.
fn top_entities(counts: &BTreeMap<String, u64>, k: usize) -> Vec<&String> {
    let mut ranked: Vec<(&String, u64)> = counts.iter().map(|(e, &c)| (e, c)).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(k);
    ranked.into_iter().map(|(e, _)| e).collect()
}

/// Counts of toned emoji occurrences per skin-tone category. Values are
/// real-valued so bootstrapped means can be reported for real data.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SkinToneDistribution {
    pub light: f64,
    pub medium_light: f64,
    pub medium: f64,
    pub medium_dark: f64,
    pub dark: f64,
}

impl SkinToneDistribution {
    pub fn get(&self, tone: SkinTone) -> f64 {
        match tone {
            SkinTone::Light => self.light,
            SkinTone::MediumLight => self.medium_light,
            SkinTone::Medium => self.medium,
            SkinTone::MediumDark => self.medium_dark,
            SkinTone::Dark => self.dark,
        }
    }

    fn add(&mut self, tone: SkinTone, amount: f64) {
        match tone {
            SkinTone::Light => self.light += amount,
            SkinTone::MediumLight => self.medium_light += amount,
            SkinTone::Medium => self.medium += amount,
            SkinTone::MediumDark => self.medium_dark += amount,
            SkinTone::Dark => self.dark += amount,
        }
    }

    pub fn total(&self) -> f64 {
        self.light + self.medium_light + self.medium + self.medium_dark + self.dark
    }

    pub fn average(dists: &[SkinToneDistribution]) -> SkinToneDistribution {
        assert!(!dists.is_empty(), "average of zero distributions");
        let n = dists.len() as f64;
        let mut avg = SkinToneDistribution::default();
        for tone in SkinTone::ALL {
            avg.add(tone, dists.iter().map(|d| d.get(tone)).sum::<f64>() / n);
        }
        avg
    }
}

/// Counts toned emoji occurrences per category; default-tone emojis are
/// excluded.
pub fn skin_tones(data: &Dataset) -> SkinToneDistribution {
    let mut dist = SkinToneDistribution::default();
    for text in data.texts() {
        for emoji in textfeat::parse(text).emojis {
            if let Some(tone) = emoji.tone {
                dist.add(tone, 1.0);
            }
        }
    }
    dist
}

/// Share of distinct caption texts, compared after trimming and Unicode NFC
/// normalization (case-sensitive).
pub fn unique_caption_pct(data: &Dataset) -> Result<f64, ContentError> {
    require_non_empty(data)?;
    let distinct: BTreeSet<String> =
        data.texts().map(|t| t.trim().nfc().collect::<String>()).collect();
    Ok(100.0 * distinct.len() as f64 / data.len() as f64)
}

/// Frequency-ranked entities present in one corpus and absent from the other.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityDiff {
    pub kind: EntityKind,
    pub top_in_real_missing_in_synth: Vec<String>,
    pub top_in_synth_missing_in_real: Vec<String>,
}

impl EntityDiff {
    /// Two-column markdown table of the diff lists.
    pub fn to_markdown(&self) -> String {
        let rows =
            self.top_in_real_missing_in_synth.len().max(self.top_in_synth_missing_in_real.len());
        let mut out = String::new();
        out.push_str(&format!(
            "| top {} in real, missing in synthetic | top {} in synthetic, missing in real |\n",
            self.kind.as_str(),
            self.kind.as_str()
        ));
        out.push_str("| --- | --- |\n");
        for i in 0..rows {
            let left = self.top_in_real_missing_in_synth.get(i).map(String::as_str).unwrap_or("");
            let right = self.top_in_synth_missing_in_real.get(i).map(String::as_str).unwrap_or("");
            out.push_str(&format!("| {left} | {right} |\n"));
        }
        out
    }
}

/// Top `top` most frequent entities of each corpus that never occur in the
/// other corpus.
pub fn entity_diff(
    synth: &Dataset,
    real: &Dataset,
    kind: EntityKind,
    top: usize,
) -> Result<EntityDiff, ContentError> {
    require_non_empty(synth)?;
    require_non_empty(real)?;
    let synth_counts = entity_counts(synth, kind);
    let real_counts = entity_counts(real, kind);
    let missing = |from: &BTreeMap<String, u64>, other: &BTreeMap<String, u64>| {
        let mut ranked: Vec<(&String, u64)> =
            from.iter().filter(|(e, _)| !other.contains_key(*e)).map(|(e, &c)| (e, c)).collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(top);
        ranked.into_iter().map(|(e, _)| e.clone()).collect::<Vec<_>>()
    };
    Ok(EntityDiff {
        kind,
        top_in_real_missing_in_synth: missing(&real_counts, &synth_counts),
        top_in_synth_missing_in_real: missing(&synth_counts, &real_counts),
    })
}

fn require_non_empty(data: &Dataset) -> Result<(), ContentError> {
    if data.is_empty() {
        Err(ContentError::EmptyDataset(data.name.clone()))
    } else {
        Ok(())
    }
}
