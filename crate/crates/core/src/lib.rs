//! Core algorithms for evaluating and controlling biomedical text simplification.
//!
//! This crate is `no_std` and only needs an allocator. It covers:
//!
//! * corpus types and the train/validation/test split protocol ([`corpus`]),
//! * a deterministic tokenizer ([`text`]),
//! * dependency parses, frequency ranks and token embeddings used as sidecar
//!   resources ([`parse`], [`lexicon`], [`embeddings`]),
//! * BLEU, ROUGE, SARI and greedy embedding matching ([`metrics`]),
//! * control-token attributes, quantization and rendering ([`control_tokens`]),
//! * control-token value search and the length-ratio predictor ([`search`]),
//! * the blinded pairwise human-evaluation protocol and agreement
//!   statistics ([`human_eval`]),
//! * model selection and learning-curve aggregation ([`selection`]).
//!
//! File formats, generator bindings, the rating service and the CLI live in
//! the `simpkit` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod control_tokens;
pub mod corpus;
pub mod embeddings;
mod error;
pub mod human_eval;
pub mod lexicon;
mod math;
pub mod metrics;
pub mod parse;
pub mod search;
pub mod selection;
pub mod text;

pub use error::{Error, Result};
