//! Toolkit for generating synthetic social-media captions through prompted
//! LLM endpoints and evaluating them against real caption corpora.
//!
//! Evaluation covers two axes:
//!
//! - **Fidelity** — how closely a synthetic corpus resembles a real one:
//!   caption composition statistics ([`composition`]), content overlap and
//!   n-gram similarity ([`content`]), embedding-space similarity
//!   ([`embedding`]), and tag co-occurrence network structure ([`network`]).
//! - **Utility** — how useful synthetic captions are as training data for
//!   sponsored-content detection ([`downstream`]).
//!
//! [`dataset`] handles corpus ingestion and bootstrapped resampling,
//! [`textfeat`] provides the shared caption parser, [`genharness`] drives
//! caption generation against chat-completion endpoints, and [`report`]
//! renders results as tables.

pub mod composition;
pub mod content;
pub mod dataset;
pub mod downstream;
pub mod embedding;
pub mod genharness;
pub mod network;
pub mod report;
#[cfg(test)]
mod testutil;
pub mod textfeat;

pub use dataset::{BootstrapSummary, CaptionRecord, Dataset, Label, Source, Strategy};
