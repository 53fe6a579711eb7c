//! Frequency-rank lexicon used for the lexical control token.

use alloc::collections::BTreeMap;
use alloc::string::String;

use crate::{Error, Result};

/// Token to 1-based frequency rank; unknown tokens get `len() + 1`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RankTable {
    ranks: BTreeMap<String, u32>,
}

impl RankTable {
    /// Builds a table from tokens in descending frequency order.
    ///
    /// Tokens are lowercased to match [`crate::text::tokenize`]; a token seen
    /// again keeps its first (best) rank.
    pub fn from_ranked<I, S>(tokens: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut ranks = BTreeMap::new();
        for token in tokens {
            let next = ranks.len() as u32 + 1;
            ranks.entry(token.as_ref().to_lowercase()).or_insert(next);
        }
        if ranks.is_empty() {
            return Err(Error::InvalidInput("frequency list is empty".into()));
        }
        Ok(Self { ranks })
    }

    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn default_rank(&self) -> u32 {
        self.ranks.len() as u32 + 1
    }

    pub fn rank(&self, token: &str) -> u32 {
        self.ranks
            .get(token)
            .copied()
            .unwrap_or_else(|| self.default_rank())
    }
}
