//! Per-token embedding sidecars for the greedy-matching metric.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Token vectors for one sentence; every vector has the same non-zero dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEmbeddings", into = "RawEmbeddings")]
pub struct TokenEmbeddings {
    id: String,
    tokens: Vec<String>,
    vectors: Vec<Vec<f64>>,
}

/// Wire shape: `{"id", "tokens", "vecs"}`.
#[derive(Serialize, Deserialize)]
struct RawEmbeddings {
    id: String,
    tokens: Vec<String>,
    vecs: Vec<Vec<f64>>,
}

impl TryFrom<RawEmbeddings> for TokenEmbeddings {
    type Error = Error;

    fn try_from(raw: RawEmbeddings) -> Result<Self> {
        TokenEmbeddings::new(raw.id, raw.tokens, raw.vecs)
    }
}

impl From<TokenEmbeddings> for RawEmbeddings {
    fn from(e: TokenEmbeddings) -> Self {
        RawEmbeddings {
            id: e.id,
            tokens: e.tokens,
            vecs: e.vectors,
        }
    }
}

impl TokenEmbeddings {
    pub fn new(id: impl Into<String>, tokens: Vec<String>, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let id = id.into();
        let invalid = |reason: String| Error::InvalidEmbeddings {
            id: id.clone(),
            reason,
        };
        if tokens.len() != vectors.len() {
            return Err(invalid(format!(
                "{} tokens but {} vectors",
                tokens.len(),
                vectors.len()
            )));
        }
        if let Some(first) = vectors.first() {
            if first.is_empty() {
                return Err(invalid("vectors have dimension 0".into()));
            }
            if let Some(bad) = vectors.iter().position(|v| v.len() != first.len()) {
                return Err(invalid(format!(
                    "vector {bad} has dimension {}, expected {}",
                    vectors[bad].len(),
                    first.len()
                )));
            }
        }
        if vectors.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("non-finite vector component".into()));
        }
        Ok(Self {
            id,
            tokens,
            vectors,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `None` for an empty sentence.
    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(Vec::len)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}
