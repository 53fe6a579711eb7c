//! SARI: add, keep and delete n-gram scores against source and references.
//!
//! For each order `n` in `1..=4`, n-grams are compared as sets. With `R`
//! references, an n-gram's reference weight `w(g)` is the number of references
//! containing it divided by `R`.
//!
//! * ADD scores n-grams in the hypothesis but not the source. Precision counts
//!   those found in any reference; recall is `w`-weighted against every
//!   reference n-gram absent from the source.
//! * KEEP scores n-grams in both hypothesis and source. Precision and recall
//!   are `w`-weighted; the recall target is every source n-gram some
//!   reference keeps.
//! * DEL is precision only: each source n-gram the hypothesis drops earns
//!   `1 - w(g)`, the fraction of references that drop it too.
//!
//! When a component has nothing to score and nothing was expected it scores
//! 1; nothing scored while something was expected scores 0.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use crate::math::f1;
use crate::text::{ngrams, tokenize};
use crate::{Error, Result};

use super::bleu::MAX_ORDER;

/// Component scores averaged over n-gram orders, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SariComponents {
    pub add: f64,
    pub keep: f64,
    pub del: f64,
}

impl SariComponents {
    /// SARI on the 0..=100 scale.
    pub fn score(&self) -> f64 {
        100.0 * (self.add + self.keep + self.del) / 3.0
    }
}

/// Sentence SARI on the 0..=100 scale.
pub fn sari(source: &str, hypothesis: &str, references: &[String]) -> Result<f64> {
    sari_components(source, hypothesis, references).map(|c| c.score())
}

pub fn sari_components(source: &str, hypothesis: &str, references: &[String]) -> Result<SariComponents> {
    if references.is_empty() {
        return Err(Error::InvalidInput("SARI needs at least one reference".into()));
    }
    if source.trim().is_empty() {
        return Err(Error::InvalidInput("SARI needs a non-empty source".into()));
    }
    let refs: Vec<Vec<String>> = references.iter().map(|r| tokenize(r)).collect();
    Ok(sari_tokens(&tokenize(source), &tokenize(hypothesis), &refs))
}

pub(crate) fn sari_tokens(src: &[String], hyp: &[String], refs: &[Vec<String>]) -> SariComponents {
    let mut total = SariComponents {
        add: 0.0,
        keep: 0.0,
        del: 0.0,
    };
    for n in 1..=MAX_ORDER {
        let c = order_components(src, hyp, refs, n);
        total.add += c.add;
        total.keep += c.keep;
        total.del += c.del;
    }
    let k = MAX_ORDER as f64;
    SariComponents {
        add: total.add / k,
        keep: total.keep / k,
        del: total.del / k,
    }
}

fn order_components(src: &[String], hyp: &[String], refs: &[Vec<String>], n: usize) -> SariComponents {
    let source: BTreeSet<&[String]> = ngrams(src, n).collect();
    let output: BTreeSet<&[String]> = ngrams(hyp, n).collect();
    let mut containing: BTreeMap<&[String], usize> = BTreeMap::new();
    for r in refs {
        let grams: BTreeSet<&[String]> = ngrams(r, n).collect();
        for g in grams {
            *containing.entry(g).or_insert(0) += 1;
        }
    }
    let n_refs = refs.len() as f64;
    let weight = |g: &[String]| containing.get(g).map_or(0.0, |&c| c as f64 / n_refs);

    // ADD
    let added: Vec<&[String]> = output.difference(&source).copied().collect();
    let add_target: Vec<&[String]> = containing
        .keys()
        .filter(|g| !source.contains(*g))
        .copied()
        .collect();
    let add = if added.is_empty() {
        vacuous(add_target.is_empty())
    } else {
        let good = added.iter().filter(|g| containing.contains_key(*g)).count();
        let precision = good as f64 / added.len() as f64;
        let expected: f64 = add_target.iter().map(|g| weight(g)).sum();
        let recall = if expected > 0.0 {
            added.iter().map(|g| weight(g)).sum::<f64>() / expected
        } else {
            0.0
        };
        f1(precision, recall)
    };

    // KEEP
    let kept: Vec<&[String]> = output.intersection(&source).copied().collect();
    let keep_expected: f64 = source.iter().map(|g| weight(g)).sum();
    let keep = if kept.is_empty() {
        vacuous(keep_expected == 0.0)
    } else {
        let earned: f64 = kept.iter().map(|g| weight(g)).sum();
        let precision = earned / kept.len() as f64;
        let recall = if keep_expected > 0.0 {
            earned / keep_expected
        } else {
            0.0
        };
        f1(precision, recall)
    };

    // DEL
    let deleted: Vec<&[String]> = source.difference(&output).copied().collect();
    let del = if deleted.is_empty() {
        vacuous(source.iter().all(|g| weight(g) >= 1.0))
    } else {
        deleted.iter().map(|g| 1.0 - weight(g)).sum::<f64>() / deleted.len() as f64
    };

    SariComponents { add, keep, del }
}

fn vacuous(nothing_expected: bool) -> f64 {
    if nothing_expected {
        1.0
    } else {
        0.0
    }
}
