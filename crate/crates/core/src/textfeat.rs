//! Deterministic caption parsing: tokens, hashtags, user tags, emojis with
//! skin-tone decomposition, and n-grams.
//!
//! Parsing rules:
//! - tokens are the whitespace-delimited units of the raw text (tags and
//!   emojis count as tokens);
//! - hashtags are maximal `#` + letters/digits/underscore runs, case-folded;
//! - user tags are `@` + letters/digits/underscore/period runs with trailing
//!   periods stripped, case-folded;
//! - emojis are extended grapheme clusters whose base scalar carries the
//!   Unicode Emoji property. ASCII `#`, `*`, and digits carry that property
//!   only as keycap components, so they count only inside an actual keycap
//!   sequence. A ZWJ sequence counts as one occurrence whose tone is the
//!   first skin-tone modifier found.

use std::collections::{BTreeSet, HashSet};
use std::sync::OnceLock;
use unicode_properties::{GeneralCategoryGroup, UnicodeEmoji, UnicodeGeneralCategory};
use unicode_segmentation::UnicodeSegmentation;

/// Fitzpatrick skin-tone modifier categories (U+1F3FB..U+1F3FF).
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum SkinTone {
    Light,
    MediumLight,
    Medium,
    MediumDark,
    Dark,
}

impl SkinTone {
    pub const ALL: [SkinTone; 5] = [
        SkinTone::Light,
        SkinTone::MediumLight,
        SkinTone::Medium,
        SkinTone::MediumDark,
        SkinTone::Dark,
    ];

    pub fn from_modifier(c: char) -> Option<SkinTone> {
        match c {
            '\u{1F3FB}' => Some(SkinTone::Light),
            '\u{1F3FC}' => Some(SkinTone::MediumLight),
            '\u{1F3FD}' => Some(SkinTone::Medium),
            '\u{1F3FE}' => Some(SkinTone::MediumDark),
            '\u{1F3FF}' => Some(SkinTone::Dark),
            _ => None,
        }
    }

    pub fn modifier(&self) -> char {
        match self {
            SkinTone::Light => '\u{1F3FB}',
            SkinTone::MediumLight => '\u{1F3FC}',
            SkinTone::Medium => '\u{1F3FD}',
            SkinTone::MediumDark => '\u{1F3FE}',
            SkinTone::Dark => '\u{1F3FF}',
        }
    }

    pub fn display_name(&self) -> &'static str {
        match self {
            SkinTone::Light => "Light",
            SkinTone::MediumLight => "Medium-Light",
            SkinTone::Medium => "Medium",
            SkinTone::MediumDark => "Medium-Dark",
            SkinTone::Dark => "Dark",
        }
    }
}

/// One emoji occurrence, decomposed into its base sequence and skin tone.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct EmojiOccurrence {
    /// Grapheme cluster with skin-tone modifier scalars removed.
    pub base: String,
    pub tone: Option<SkinTone>,
}

impl EmojiOccurrence {
    /// Rebuilds the original grapheme by re-inserting the tone modifier
    /// directly after the base's first scalar.
    pub fn reconstruct(&self) -> String {
        match self.tone {
            None => self.base.clone(),
            Some(tone) => {
                let mut chars = self.base.chars();
                match chars.next() {
                    None => tone.modifier().to_string(),
                    Some(first) => {
                        let mut out = String::with_capacity(self.base.len() + 4);
                        out.push(first);
                        out.push(tone.modifier());
                        out.extend(chars);
                        out
                    }
                }
            }
        }
    }
}

/// Parsed view of one caption.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeatureBundle {
    pub tokens: Vec<String>,
    pub hashtags: Vec<String>,
    pub usertags: Vec<String>,
    pub emojis: Vec<EmojiOccurrence>,
    pub token_count: usize,
}

/// Parses a caption into its feature bundle. Total: empty input yields an
/// empty bundle.
pub fn parse(text: &str) -> FeatureBundle {
    let tokens: Vec<String> = text.split_whitespace().map(str::to_string).collect();
    let token_count = tokens.len();
    FeatureBundle {
        tokens,
        hashtags: extract_hashtags(text),
        usertags: extract_usertags(text),
        emojis: extract_emojis(text),
        token_count,
    }
}

fn is_tag_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn extract_hashtags(text: &str) -> Vec<String> {
    let mut tags = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '#' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&next) = chars.peek() {
            if is_tag_char(next) {
                tag.push(next);
                chars.next();
            } else {
                break;
            }
        }
        if !tag.is_empty() {
            tags.push(tag.to_lowercase());
        }
    }
    tags
}

fn extract_usertags(text: &str) -> Vec<String> {
    let mut tags = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c != '@' {
            continue;
        }
        let mut tag = String::new();
        while let Some(&next) = chars.peek() {
            if is_tag_char(next) || next == '.' {
                tag.push(next);
                chars.next();
            } else {
                break;
            }
        }
        let tag = tag.trim_end_matches('.');
        if !tag.is_empty() {
            tags.push(tag.to_lowercase());
        }
    }
    tags
}

const COMBINING_KEYCAP: char = '\u{20E3}';

fn grapheme_is_emoji(g: &str) -> bool {
    let Some(first) = g.chars().next() else { return false };
    if matches!(first, '0'..='9' | '#' | '*') {
        return g.chars().any(|c| c == COMBINING_KEYCAP);
    }
    first.is_emoji_char()
}

fn extract_emojis(text: &str) -> Vec<EmojiOccurrence> {
    let mut out = Vec::new();
    for g in text.graphemes(true) {
        if !grapheme_is_emoji(g) {
            continue;
        }
        let mut tone = None;
        let mut base = String::with_capacity(g.len());
        for c in g.chars() {
            match SkinTone::from_modifier(c) {
                Some(t) => {
                    if tone.is_none() {
                        tone = Some(t);
                    }
                }
                None => base.push(c),
            }
        }
        out.push(EmojiOccurrence { base, tone });
    }
    out
}

/// Set of space-joined n-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramSet {
    pub n: usize,
    pub grams: BTreeSet<String>,
}

/// Forms the set of contiguous n-token windows, `n` in 1..=3.
///
/// With `normalize`, tokens are case-folded, stripped of punctuation
/// (which also drops `#`/`@` sigils), and filtered against the bundled
/// stopword list before gram formation.
pub fn ngrams(tokens: &[String], n: usize, normalize: bool) -> NgramSet {
    assert!((1..=3).contains(&n), "n-gram order must be in 1..=3, got {n}");
    let cleaned: Vec<String>;
    let source: &[String] = if normalize {
        cleaned = normalize_tokens(tokens, true);
        &cleaned
    } else {
        tokens
    };
    let grams = source.windows(n).map(|w| w.join(" ")).collect();
    NgramSet { n, grams }
}

/// Case-folds a token and strips punctuation characters.
pub fn normalize_token(token: &str) -> String {
    token
        .to_lowercase()
        .chars()
        .filter(|&c| c.general_category_group() != GeneralCategoryGroup::Punctuation)
        .collect()
}

/// Applies [`normalize_token`] to a token sequence, dropping tokens that
/// become empty and, optionally, stopwords.
pub fn normalize_tokens(tokens: &[String], remove_stopwords: bool) -> Vec<String> {
    tokens
        .iter()
        .map(|t| normalize_token(t))
        .filter(|t| !t.is_empty() && !(remove_stopwords && is_stopword(t)))
        .collect()
}

/// The bundled English stopword list (one word per line, lowercase).
pub fn stopwords() -> &'static HashSet<&'static str> {
    static LIST: OnceLock<HashSet<&'static str>> = OnceLock::new();
    LIST.get_or_init(|| {
        include_str!("../resources/stopwords_en.txt")
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect()
    })
}

pub fn is_stopword(token: &str) -> bool {
    stopwords().contains(token)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(words: &[&str]) -> Vec<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parse_tags_and_emoji() {
        let b = parse("Love this! #ad @brand 😍");
        assert_eq!(b.token_count, 5);
        assert_eq!(b.hashtags, vec!["ad"]);
        assert_eq!(b.usertags, vec!["brand"]);
        assert_eq!(b.emojis, vec![EmojiOccurrence { base: "😍".into(), tone: None }]);
    }

    #[test]
    fn parse_empty() {
        let b = parse("");
        assert_eq!(b, FeatureBundle::default());
    }

    #[test]
    fn parse_dark_tone_thumbs_up() {
        let b = parse("👍🏿 great");
        assert_eq!(b.token_count, 2);
        assert_eq!(
            b.emojis,
            vec![EmojiOccurrence { base: "👍".into(), tone: Some(SkinTone::Dark) }]
        );
    }

    #[test]
    fn parse_case_folds_tags() {
        let b = parse("#SummerVibes @Brand.Official. #summervibes");
        assert_eq!(b.hashtags, vec!["summervibes", "summervibes"]);
        assert_eq!(b.usertags, vec!["brand.official"]);
    }

    #[test]
    fn parse_adjacent_hashtags() {
        let b = parse("#a#b and #_x9");
        assert_eq!(b.hashtags, vec!["a", "b", "_x9"]);
    }

    #[test]
    fn digits_and_flags() {
        assert!(parse("2024 was #1 for real").emojis.is_empty());
        let b = parse("🇺🇸 1️⃣");
        assert_eq!(b.emojis.len(), 2);
        assert_eq!(b.emojis[0].base, "🇺🇸");
        assert!(b.emojis[1].base.contains('1'));
    }

    #[test]
    fn zwj_sequence_single_occurrence_first_tone() {
        let b = parse("👩🏽\u{200D}🚀");
        assert_eq!(b.emojis.len(), 1);
        assert_eq!(b.emojis[0].tone, Some(SkinTone::Medium));
        assert_eq!(b.emojis[0].base, "👩\u{200D}🚀");
    }

    #[test]
    fn emoji_round_trip() {
        for raw in ["👍🏿", "👋🏻", "🤝🏽", "👩🏽\u{200D}🚀", "😍", "❤\u{FE0F}"]
        {
            let b = parse(raw);
            assert_eq!(b.emojis.len(), 1, "{raw:?}");
            assert_eq!(b.emojis[0].reconstruct(), raw, "{raw:?}");
        }
    }

    #[test]
    fn reparse_joined_tokens_keeps_tag_multisets() {
        for text in ["Love this! #ad #ad @brand 😍", "#a#b mixed @u.v. tail", "plain text only"] {
            let b = parse(text);
            let again = parse(&b.tokens.join(" "));
            assert_eq!(b.hashtags, again.hashtags, "{text:?}");
            assert_eq!(b.usertags, again.usertags, "{text:?}");
        }
    }

    #[test]
    fn ngrams_stopword_removal() {
        let set = ngrams(&toks(&["check", "the", "link", "in", "bio"]), 3, true);
        assert!(set.grams.contains("check link bio"));
    }

    #[test]
    fn ngrams_window_longer_than_sequence() {
        assert!(ngrams(&toks(&["a"]), 2, false).grams.is_empty());
    }

    #[test]
    fn ngrams_case_fold_set_semantics() {
        let set = ngrams(&toks(&["X", "y", "X"]), 1, true);
        assert_eq!(set.grams, BTreeSet::from(["x".to_string(), "y".to_string()]));
    }

    #[test]
    fn ngrams_sigils_dropped() {
        let set = ngrams(&toks(&["#like", "post", "@follow"]), 3, true);
        assert!(set.grams.contains("like post follow"));
    }

    #[test]
    fn bigram_tokens_are_unigrams() {
        let tokens = toks(&["New", "skincare", "routine", "drops", "today!"]);
        let unis = ngrams(&tokens, 1, true).grams;
        for bigram in &ngrams(&tokens, 2, true).grams {
            for part in bigram.split(' ') {
                assert!(unis.contains(part), "{part} missing from unigrams");
            }
        }
    }

    #[test]
    #[should_panic(expected = "n-gram order")]
    fn ngrams_rejects_order_four() {
        ngrams(&toks(&["a", "b"]), 4, false);
    }

    #[test]
    fn stopword_list_shape() {
        let sw = stopwords();
        assert!(sw.len() >= 120 && sw.len() <= 200, "unexpected list size {}", sw.len());
        for kept in ["like", "post", "follow", "check", "link", "bio", "giveaway"] {
            assert!(!sw.contains(kept), "{kept} must not be a stopword");
        }
        for dropped in ["the", "in", "a", "and"] {
            assert!(sw.contains(dropped), "{dropped} missing from stopwords");
        }
    }
}
