//! Prompt construction for the four generation strategies.
//!
//! The full prompt texts ship as versioned template resources with
//! placeholder slots (count, length bounds, label clause, examples block).
//! The imitation template never mentions the platform by name; when
//! sampling its examples, pool entries containing that name are skipped so
//! the assembled prompt keeps that guarantee.

use crate::dataset::{Dataset, Label, Strategy};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::GenError;

const BASE_TEMPLATE: &str = include_str!("../../resources/prompts/base.txt");
const IMITATION_TEMPLATE: &str = include_str!("../../resources/prompts/imitation.txt");
const SPONSORED_CLAUSE: &str = include_str!("../../resources/prompts/sponsored_clause.txt");
const NONSPONSORED_CLAUSE: &str = include_str!("../../resources/prompts/nonsponsored_clause.txt");

/// Number of example captions injected into example-based prompts.
pub const EXAMPLES_PER_PROMPT: usize = 5;

/// One prompt configuration: strategy kind, target label, request sizing,
/// and example sources.
#[derive(Debug, Clone)]
pub struct PromptStrategy {
    pub kind: Strategy,
    pub label: Label,
    pub n_captions_per_request: usize,
    pub example_pool: Option<Dataset>,
    pub fixed_examples: Option<Vec<String>>,
    pub length_bounds: (usize, usize),
}

impl PromptStrategy {
    pub fn new(kind: Strategy, label: Label) -> PromptStrategy {
        PromptStrategy {
            kind,
            label,
            n_captions_per_request: 15,
            example_pool: None,
            fixed_examples: None,
            length_bounds: (10, 300),
        }
    }

    pub fn with_fixed_examples(mut self, examples: Vec<String>) -> PromptStrategy {
        self.fixed_examples = Some(examples);
        self
    }

    pub fn with_example_pool(mut self, pool: Dataset) -> PromptStrategy {
        self.example_pool = Some(pool);
        self
    }

    /// Checks the field invariants: fixed examples present (exactly five)
    /// iff the kind is FixedExamples; an example pool present iff the kind
    /// samples from one.
    pub fn validate(&self) -> Result<(), GenError> {
        let invalid = |msg: &str| Err(GenError::InvalidStrategy(msg.to_string()));
        match self.kind {
            Strategy::Base => {
                if self.fixed_examples.is_some() || self.example_pool.is_some() {
                    return invalid("base strategy takes no examples");
                }
            }
            Strategy::FixedExamples => {
                match &self.fixed_examples {
                    Some(e) if e.len() == EXAMPLES_PER_PROMPT => {}
                    Some(e) => {
                        return Err(GenError::InvalidStrategy(format!(
                            "fixed_examples needs exactly {EXAMPLES_PER_PROMPT} examples, got {}",
                            e.len()
                        )))
                    }
                    None => return invalid("fixed_examples strategy requires example texts"),
                }
                if self.example_pool.is_some() {
                    return invalid("fixed_examples strategy takes no example pool");
                }
            }
            Strategy::RandomExamples | Strategy::Imitation => {
                if self.example_pool.is_none() {
                    return invalid("sampling strategy requires an example pool");
                }
                if self.fixed_examples.is_some() {
                    return invalid("sampling strategy takes no fixed examples");
                }
            }
        }
        if self.n_captions_per_request == 0 {
            return invalid("n_captions_per_request must be positive");
        }
        Ok(())
    }
}

/// Renders the prompt for one request. Example-sampling strategies draw
/// their five examples deterministically from `seed`.
pub fn build_prompt(strategy: &PromptStrategy, seed: u64) -> Result<String, GenError> {
    strategy.validate()?;
    let examples = select_examples(strategy, seed)?;
    let noun = match strategy.kind {
        Strategy::Imitation => "texts",
        _ => "captions",
    };
    let examples_block = match &examples {
        None => String::new(),
        Some(list) => {
            let mut block = format!("Here are five example {noun}:\n");
            for (i, example) in list.iter().enumerate() {
                block.push_str(&format!("{}. {}\n", i + 1, example));
            }
            block.push('\n');
            block
        }
    };
    let label_clause = match strategy.label {
        Label::Sponsored => SPONSORED_CLAUSE.trim(),
        Label::Nonsponsored => NONSPONSORED_CLAUSE.trim(),
    };
    let template = match strategy.kind {
        Strategy::Imitation => IMITATION_TEMPLATE,
        _ => BASE_TEMPLATE,
    };
    Ok(template
        .replace("{count}", &strategy.n_captions_per_request.to_string())
        .replace("{min_tokens}", &strategy.length_bounds.0.to_string())
        .replace("{max_tokens}", &strategy.length_bounds.1.to_string())
        .replace("{label_clause}", label_clause)
        .replace("{examples_block}", &examples_block))
}

fn select_examples(strategy: &PromptStrategy, seed: u64) -> Result<Option<Vec<String>>, GenError> {
    match strategy.kind {
        Strategy::Base => Ok(None),
        Strategy::FixedExamples => Ok(strategy.fixed_examples.clone()),
        Strategy::RandomExamples | Strategy::Imitation => {
            let pool = strategy.example_pool.as_ref().expect("validated");
            let mut order: Vec<usize> = (0..pool.len()).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            order.shuffle(&mut rng);
            let mut picked = Vec::with_capacity(EXAMPLES_PER_PROMPT);
            for idx in order {
                let text = pool.records[idx].text.replace(['\n', '\r'], " ");
                if strategy.kind == Strategy::Imitation && text.to_lowercase().contains("instagram")
                {
                    continue;
                }
                picked.push(text);
                if picked.len() == EXAMPLES_PER_PROMPT {
                    return Ok(Some(picked));
                }
            }
            Err(GenError::PoolTooSmall { needed: EXAMPLES_PER_PROMPT, got: picked.len() })
        }
    }
}
