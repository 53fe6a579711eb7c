//! Greedy cosine matching between token embeddings (the BERTScore mechanism,
//! without idf weighting or baseline rescaling).

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::embeddings::TokenEmbeddings;
use crate::math::{f1, sqrt};
use crate::{Error, Result};

/// Precision, recall and F on the ×100 scale; cosine can make them negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingScore {
    pub precision: f64,
    pub recall: f64,
    pub f: f64,
}

/// Scores `hyp` against each reference and keeps the one with the best F.
pub fn embedding_f(hyp: &TokenEmbeddings, refs: &[TokenEmbeddings]) -> Result<EmbeddingScore> {
    if refs.is_empty() {
        return Err(Error::InvalidInput("embedding-F needs at least one reference".into()));
    }
    let mut best: Option<EmbeddingScore> = None;
    for r in refs {
        let s = greedy_match(hyp, r)?;
        if best.is_none_or(|b| s.f > b.f) {
            best = Some(s);
        }
    }
    Ok(best.expect("at least one reference"))
}

fn greedy_match(hyp: &TokenEmbeddings, reference: &TokenEmbeddings) -> Result<EmbeddingScore> {
    let (Some(h_dim), Some(r_dim)) = (hyp.dim(), reference.dim()) else {
        return Err(Error::InvalidInput(format!(
            "empty token list in `{}` or `{}`",
            hyp.id(),
            reference.id()
        )));
    };
    if h_dim != r_dim {
        return Err(Error::InvalidEmbeddings {
            id: reference.id().into(),
            reason: format!("dimension {r_dim} does not match hypothesis dimension {h_dim}"),
        });
    }
    let sims: alloc::vec::Vec<alloc::vec::Vec<f64>> = hyp
        .vectors()
        .iter()
        .map(|h| reference.vectors().iter().map(|r| cosine(h, r)).collect())
        .collect();
    let precision = sims
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / sims.len() as f64;
    let recall = (0..reference.len())
        .map(|j| sims.iter().map(|row| row[j]).fold(f64::NEG_INFINITY, f64::max))
        .sum::<f64>()
        / reference.len() as f64;
    Ok(EmbeddingScore {
        precision: 100.0 * precision,
        recall: 100.0 * recall,
        f: 100.0 * f1(precision, recall),
    })
}

/// Cosine similarity; a zero vector is similar to nothing.
fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = sqrt(a.iter().map(|x| x * x).sum());
    let nb = sqrt(b.iter().map(|x| x * x).sum());
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;
    use alloc::vec;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn emb(id: &str, vecs: Vec<Vec<f64>>) -> TokenEmbeddings {
        let toks = (0..vecs.len()).map(|i| format!("t{i}")).collect::<Vec<String>>();
        TokenEmbeddings::new(id, toks, vecs).unwrap()
    }

    #[test]
    fn identical_sequences_score_100() {
        let e = emb("h", vec![vec![0.3, 0.1, -2.0], vec![1.0, 1.0, 0.0]]);
        let s = embedding_f(&e, core::slice::from_ref(&e)).unwrap();
        assert!((s.precision - 100.0).abs() < 1e-9);
        assert!((s.recall - 100.0).abs() < 1e-9);
        assert!((s.f - 100.0).abs() < 1e-9);
    }

    #[test]
    fn orthogonal_sequences_score_0() {
        let h = emb("h", vec![vec![1.0, 0.0, 0.0]]);
        let r = emb("r", vec![vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 2.0]]);
        let s = embedding_f(&h, &[r]).unwrap();
        assert_eq!((s.precision, s.recall, s.f), (0.0, 0.0, 0.0));
    }

    #[test]
    fn greedy_matching_hand_example() {
        let h = emb("h", vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let r = emb("r", vec![vec![1.0, 0.0]]);
        let s = embedding_f(&h, &[r]).unwrap();
        assert!((s.recall - 100.0).abs() < 1e-12);
        assert!((s.precision - 50.0).abs() < 1e-12);
        assert!((s.f - 200.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn best_reference_is_kept() {
        let h = emb("h", vec![vec![1.0, 0.0]]);
        let bad = emb("r0", vec![vec![0.0, 1.0]]);
        let good = emb("r1", vec![vec![2.0, 0.0]]);
        let s = embedding_f(&h, &[bad, good]).unwrap();
        assert!((s.f - 100.0).abs() < 1e-9);
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let h = emb("h", vec![vec![1.0, 0.0]]);
        let r = emb("r", vec![vec![1.0, 0.0, 0.0]]);
        assert!(embedding_f(&h, &[r]).is_err());
        assert!(embedding_f(&h, &[]).is_err());
    }

    proptest! {
        /// Max-pooling over hypothesis tokens: duplicating one leaves recall unchanged.
        #[test]
        fn recall_ignores_duplicated_hypothesis_token(
            hyp in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 3), 1..5),
            reference in proptest::collection::vec(proptest::collection::vec(-3.0f64..3.0, 3), 1..5),
            pick in any::<prop::sample::Index>(),
        ) {
            let h = emb("h", hyp.clone());
            let mut dup = hyp.clone();
            dup.push(hyp[pick.index(hyp.len())].clone());
            let h2 = emb("h", dup);
            let r = emb("r", reference);
            let a = embedding_f(&h, core::slice::from_ref(&r)).unwrap();
            let b = embedding_f(&h2, core::slice::from_ref(&r)).unwrap();
            prop_assert!((a.recall - b.recall).abs() < 1e-9);
        }
    }
}
