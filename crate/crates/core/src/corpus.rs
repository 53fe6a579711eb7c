//! Sentence pairs and the train/validation/test split protocol.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::math::round;
use crate::{Error, Result};

/// One source sentence and its reference simplifications.
///
/// A pair with no references is a sentence the adaptation dropped entirely.
/// Such pairs are kept on load and removed by [`make_splits`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub id: String,
    pub doc_id: String,
    pub src: String,
    pub refs: Vec<String>,
}

impl SentencePair {
    pub fn is_multi_reference(&self) -> bool {
        self.refs.len() >= 2
    }
}

/// Sidecar key (parses, embeddings) for a pair's source sentence: the pair id.
pub fn source_key(pair_id: &str) -> String {
    pair_id.into()
}

/// Sidecar key for reference `index` (0-based) of a pair: `"{id}:ref{index}"`.
pub fn reference_key(pair_id: &str, index: usize) -> String {
    format!("{pair_id}:ref{index}")
}

/// Fails with [`Error::DuplicateId`] on the first repeated id.
pub fn check_unique_ids<'a>(ids: impl IntoIterator<Item = &'a str>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateId(id.into()));
        }
    }
    Ok(())
}

/// Train/validation/test proportions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitRatios {
    pub train: f64,
    pub validation: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, validation: f64, test: f64) -> Result<Self> {
        let ratios = Self {
            train,
            validation,
            test,
        };
        let parts = [train, validation, test];
        if parts.iter().any(|r| !r.is_finite() || *r < 0.0) {
            return Err(Error::InvalidInput(format!(
                "split ratios must be non-negative, got {train}/{validation}/{test}"
            )));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "split ratios must sum to 1, got {sum}"
            )));
        }
        Ok(ratios)
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.8,
            validation: 0.1,
            test: 0.1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitSet {
    pub train: Vec<SentencePair>,
    pub validation: Vec<SentencePair>,
    pub test: Vec<SentencePair>,
    pub seed: u64,
    pub ratios: SplitRatios,
}

impl SplitSet {
    /// `(train, validation, test)` sizes.
    pub fn sizes(&self) -> (usize, usize, usize) {
        (self.train.len(), self.validation.len(), self.test.len())
    }

    pub fn total(&self) -> usize {
        self.train.len() + self.validation.len() + self.test.len()
    }
}

/// Splits `pairs` into train, validation and test sets.
///
/// Pairs without references are dropped first. Validation and test quotas are
/// `round(n * ratio)` of the remaining `n` pairs and are filled only with
/// multi-reference pairs. Documents are shuffled as units with a ChaCha8 RNG
/// seeded by `seed`; walking the shuffled documents in order, each
/// multi-reference pair goes to validation until it is full, then to test,
/// and everything else goes to train.
pub fn make_splits(pairs: Vec<SentencePair>, ratios: SplitRatios, seed: u64) -> Result<SplitSet> {
    let ratios = SplitRatios::new(ratios.train, ratios.validation, ratios.test)?;
    check_unique_ids(pairs.iter().map(|p| p.id.as_str()))?;

    let kept: Vec<SentencePair> = pairs.into_iter().filter(|p| !p.refs.is_empty()).collect();
    if kept.is_empty() {
        return Err(Error::NoData);
    }
    let n = kept.len() as f64;
    let n_validation = round(n * ratios.validation) as usize;
    let n_test = (round(n * ratios.test) as usize).min(kept.len() - n_validation.min(kept.len()));
    let available = kept.iter().filter(|p| p.is_multi_reference()).count();
    if available < n_validation + n_test {
        return Err(Error::MultiRefShortfall {
            needed: n_validation + n_test,
            available,
        });
    }

    // Group by document in first-appearance order so the shuffle is a
    // function of the input order and the seed only.
    let mut doc_index: BTreeMap<String, usize> = BTreeMap::new();
    let mut docs: Vec<Vec<SentencePair>> = Vec::new();
    for pair in kept {
        let slot = *doc_index.entry(pair.doc_id.clone()).or_insert_with(|| {
            docs.push(Vec::new());
            docs.len() - 1
        });
        docs[slot].push(pair);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    docs.shuffle(&mut rng);

    let mut split = SplitSet {
        train: Vec::new(),
        validation: Vec::new(),
        test: Vec::new(),
        seed,
        ratios,
    };
    for pair in docs.into_iter().flatten() {
        if pair.is_multi_reference() && split.validation.len() < n_validation {
            split.validation.push(pair);
        } else if pair.is_multi_reference() && split.test.len() < n_test {
            split.test.push(pair);
        } else {
            split.train.push(pair);
        }
    }
    Ok(split)
}
