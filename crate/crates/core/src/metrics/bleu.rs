//! Corpus BLEU with clipped n-gram precision and closest-length brevity penalty.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use crate::math::{exp, ln};
use crate::text::{ngrams, tokenize};
use crate::{Error, Result};

pub const MAX_ORDER: usize = 4;

/// Sufficient statistics for BLEU, summable across sentences.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BleuStats {
    pub matches: [usize; MAX_ORDER],
    pub totals: [usize; MAX_ORDER],
    pub hyp_len: usize,
    pub ref_len: usize,
}

impl BleuStats {
    pub fn from_tokens(hyp: &[String], refs: &[Vec<String>]) -> Self {
        let mut stats = Self {
            hyp_len: hyp.len(),
            ref_len: closest_ref_len(hyp.len(), refs),
            ..Self::default()
        };
        for n in 1..=MAX_ORDER {
            let hyp_counts = counts(hyp, n);
            let mut max_ref: BTreeMap<&[String], usize> = BTreeMap::new();
            for r in refs {
                for (gram, c) in counts(r, n) {
                    let slot = max_ref.entry(gram).or_insert(0);
                    *slot = (*slot).max(c);
                }
            }
            stats.totals[n - 1] = hyp_counts.values().sum();
            stats.matches[n - 1] = hyp_counts
                .iter()
                .map(|(g, &c)| c.min(max_ref.get(g).copied().unwrap_or(0)))
                .sum();
        }
        stats
    }

    pub fn add(&mut self, other: &Self) {
        for n in 0..MAX_ORDER {
            self.matches[n] += other.matches[n];
            self.totals[n] += other.totals[n];
        }
        self.hyp_len += other.hyp_len;
        self.ref_len += other.ref_len;
    }

    /// BLEU on the 0..=100 scale.
    ///
    /// Orders 2..=4 with no matches use add-one smoothing,
    /// `1 / (total + 1)`. A zero unigram precision gives 0.
    pub fn score(&self) -> f64 {
        if self.hyp_len == 0 || self.matches[0] == 0 {
            return 0.0;
        }
        let mut log_sum = 0.0;
        for n in 0..MAX_ORDER {
            let p = if n > 0 && self.matches[n] == 0 {
                1.0 / (self.totals[n] as f64 + 1.0)
            } else {
                self.matches[n] as f64 / self.totals[n] as f64
            };
            log_sum += ln(p);
        }
        let bp = if self.hyp_len > self.ref_len {
            1.0
        } else {
            exp(1.0 - self.ref_len as f64 / self.hyp_len as f64)
        };
        100.0 * bp * exp(log_sum / MAX_ORDER as f64)
    }
}

fn counts(tokens: &[String], n: usize) -> BTreeMap<&[String], usize> {
    let mut m = BTreeMap::new();
    for g in ngrams(tokens, n) {
        *m.entry(g).or_insert(0) += 1;
    }
    m
}

/// Reference length closest to `hyp_len`; ties go to the shorter reference.
fn closest_ref_len(hyp_len: usize, refs: &[Vec<String>]) -> usize {
    refs.iter()
        .map(Vec::len)
        .min_by_key(|&len| (len.abs_diff(hyp_len), len))
        .unwrap_or(0)
}

/// Single-sentence BLEU with the same conventions as [`corpus_bleu`].
pub fn sentence_bleu(hypothesis: &str, references: &[String]) -> f64 {
    let refs: Vec<Vec<String>> = references.iter().map(|r| tokenize(r)).collect();
    BleuStats::from_tokens(&tokenize(hypothesis), &refs).score()
}

/// Corpus-level BLEU over hypotheses and references keyed by sentence id.
pub fn corpus_bleu(
    hypotheses: &BTreeMap<String, String>,
    references: &BTreeMap<String, Vec<String>>,
) -> Result<f64> {
    if hypotheses.is_empty() {
        return Err(Error::InvalidInput("no hypotheses to score".into()));
    }
    let missing: Vec<String> = hypotheses
        .keys()
        .filter(|k| !references.contains_key(*k))
        .chain(references.keys().filter(|k| !hypotheses.contains_key(*k)))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Error::IdMismatch(missing));
    }
    let mut total = BleuStats::default();
    for (id, hyp) in hypotheses {
        let refs = &references[id];
        if refs.is_empty() {
            return Err(Error::InvalidInput(alloc::format!("no references for `{id}`")));
        }
        let refs: Vec<Vec<String>> = refs.iter().map(|r| tokenize(r)).collect();
        total.add(&BleuStats::from_tokens(&tokenize(hyp), &refs));
    }
    Ok(total.score())
}
