//! Dependency parses used for the syntactic control token.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A validated single-root dependency tree.
///
/// `heads[i]` is the 0-based index of token `i`'s head, or `None` for the root.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawParse", into = "RawParse")]
pub struct DepParse {
    sentence_id: String,
    tokens: Vec<String>,
    heads: Vec<Option<usize>>,
    depth: usize,
}

#[derive(Serialize, Deserialize)]
struct RawParse {
    sentence_id: String,
    tokens: Vec<String>,
    heads: Vec<Option<usize>>,
}

impl TryFrom<RawParse> for DepParse {
    type Error = Error;

    fn try_from(raw: RawParse) -> Result<Self> {
        DepParse::new(raw.sentence_id, raw.tokens, raw.heads)
    }
}

impl From<DepParse> for RawParse {
    fn from(p: DepParse) -> Self {
        RawParse {
            sentence_id: p.sentence_id,
            tokens: p.tokens,
            heads: p.heads,
        }
    }
}

impl DepParse {
    /// Validates that `heads` describes a tree with exactly one root.
    pub fn new(
        sentence_id: impl Into<String>,
        tokens: Vec<String>,
        heads: Vec<Option<usize>>,
    ) -> Result<Self> {
        let sentence_id = sentence_id.into();
        let invalid = |reason: String| Error::InvalidParse {
            sentence_id: sentence_id.clone(),
            reason,
        };
        if heads.is_empty() {
            return Err(invalid("parse has no tokens".into()));
        }
        if tokens.len() != heads.len() {
            return Err(invalid(format!(
                "{} tokens but {} heads",
                tokens.len(),
                heads.len()
            )));
        }
        let roots = heads.iter().filter(|h| h.is_none()).count();
        if roots != 1 {
            return Err(invalid(format!("expected exactly one root, found {roots}")));
        }
        for (i, head) in heads.iter().enumerate() {
            match *head {
                Some(h) if h >= heads.len() => {
                    return Err(invalid(format!("token {i} has out-of-range head {h}")))
                }
                Some(h) if h == i => return Err(invalid(format!("token {i} heads itself"))),
                _ => {}
            }
        }
        let depth = tree_depth(&heads).ok_or_else(|| invalid("head links form a cycle".into()))?;
        Ok(Self {
            sentence_id,
            tokens,
            heads,
            depth,
        })
    }

    pub fn sentence_id(&self) -> &str {
        &self.sentence_id
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn heads(&self) -> &[Option<usize>] {
        &self.heads
    }

    pub fn len(&self) -> usize {
        self.heads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heads.is_empty()
    }

    /// Number of nodes on the longest root-to-leaf path; a single token has depth 1.
    pub fn depth(&self) -> usize {
        self.depth
    }
}

/// Node depth of every token, or `None` if some token never reaches the root.
fn tree_depth(heads: &[Option<usize>]) -> Option<usize> {
    const UNKNOWN: usize = 0;
    let mut depth = vec![UNKNOWN; heads.len()];
    let mut path = Vec::new();
    for start in 0..heads.len() {
        let mut node = start;
        // Walk up until a node with known depth or the root.
        let base = loop {
            if depth[node] != UNKNOWN {
                break depth[node];
            }
            if path.len() > heads.len() {
                return None;
            }
            path.push(node);
            match heads[node] {
                None => break 0,
                Some(h) => node = h,
            }
        };
        for (offset, &n) in path.iter().rev().enumerate() {
            depth[n] = base + offset + 1;
        }
        path.clear();
    }
    depth.into_iter().max()
}
