//! ROUGE-1, ROUGE-2 and ROUGE-L F1 with max-over-references aggregation.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;

use serde::{Deserialize, Serialize};

use crate::math::f1;
use crate::text::{ngrams, tokenize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RougeVariant {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "2")]
    Two,
    #[serde(rename = "L")]
    L,
}

/// ROUGE F1 on the 0..=100 scale; the best reference wins.
///
/// An empty hypothesis scores 0, as does an empty reference.
pub fn rouge(hypothesis: &str, references: &[String], variant: RougeVariant) -> f64 {
    let hyp = tokenize(hypothesis);
    references
        .iter()
        .map(|r| rouge_tokens(&hyp, &tokenize(r), variant))
        .fold(0.0, f64::max)
}

pub(crate) fn rouge_tokens(hyp: &[String], reference: &[String], variant: RougeVariant) -> f64 {
    let (overlap, hyp_total, ref_total) = match variant {
        RougeVariant::One => ngram_overlap(hyp, reference, 1),
        RougeVariant::Two => ngram_overlap(hyp, reference, 2),
        RougeVariant::L => (lcs_len(hyp, reference), hyp.len(), reference.len()),
    };
    if overlap == 0 || hyp_total == 0 || ref_total == 0 {
        return 0.0;
    }
    100.0 * f1(
        overlap as f64 / hyp_total as f64,
        overlap as f64 / ref_total as f64,
    )
}

fn ngram_overlap(hyp: &[String], reference: &[String], n: usize) -> (usize, usize, usize) {
    let mut ref_counts: BTreeMap<&[String], usize> = BTreeMap::new();
    for g in ngrams(reference, n) {
        *ref_counts.entry(g).or_insert(0) += 1;
    }
    let ref_total: usize = ref_counts.values().sum();
    let mut hyp_total = 0;
    let mut overlap = 0;
    for g in ngrams(hyp, n) {
        hyp_total += 1;
        if let Some(c) = ref_counts.get_mut(g) {
            if *c > 0 {
                *c -= 1;
                overlap += 1;
            }
        }
    }
    (overlap, hyp_total, ref_total)
}

fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    let mut cur = vec![0usize; b.len() + 1];
    for x in a {
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y {
                prev[j] + 1
            } else {
                cur[j].max(prev[j + 1])
            };
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}
