//! Automatic metrics and per-system reports.

mod bleu;
mod embedding;
mod rouge;
mod sari;

pub use bleu::{corpus_bleu, sentence_bleu, BleuStats};
pub use embedding::{embedding_f, EmbeddingScore};
pub use rouge::{rouge, RougeVariant};
pub use sari::{sari, sari_components, SariComponents};

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{reference_key, SentencePair};
use crate::embeddings::TokenEmbeddings;
use crate::math::mean;
use crate::text::tokenize;
use crate::{Error, Result};

/// Report columns, in table order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Metric {
    #[serde(rename = "bleu")]
    Bleu,
    #[serde(rename = "rouge1")]
    Rouge1,
    #[serde(rename = "rouge2")]
    Rouge2,
    #[serde(rename = "rougeL")]
    RougeL,
    #[serde(rename = "sari")]
    Sari,
    #[serde(rename = "embedding_f")]
    EmbeddingF,
}

impl Metric {
    pub const ALL: [Metric; 6] = [
        Metric::Bleu,
        Metric::Rouge1,
        Metric::Rouge2,
        Metric::RougeL,
        Metric::Sari,
        Metric::EmbeddingF,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Metric::Bleu => "BLEU",
            Metric::Rouge1 => "ROUGE-1",
            Metric::Rouge2 => "ROUGE-2",
            Metric::RougeL => "ROUGE-L",
            Metric::Sari => "SARI",
            Metric::EmbeddingF => "Emb-F",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Metric::Bleu => "bleu",
            Metric::Rouge1 => "rouge1",
            Metric::Rouge2 => "rouge2",
            Metric::RougeL => "rougeL",
            Metric::Sari => "sari",
            Metric::EmbeddingF => "embedding_f",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub system_name: String,
    pub corpus_scores: BTreeMap<Metric, f64>,
    pub per_sentence: BTreeMap<String, BTreeMap<Metric, f64>>,
    pub n_sentences: usize,
}

impl MetricReport {
    pub fn score(&self, metric: Metric) -> Option<f64> {
        self.corpus_scores.get(&metric).copied()
    }
}

/// Token embeddings keyed by hypothesis id and by [`reference_key`].
#[derive(Debug, Clone, Copy)]
pub struct EmbeddingSources<'a> {
    pub hypotheses: &'a BTreeMap<String, TokenEmbeddings>,
    pub references: &'a BTreeMap<String, TokenEmbeddings>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalConfig {
    pub metrics: BTreeSet<Metric>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            metrics: Metric::ALL.into_iter().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub report: MetricReport,
    /// Prediction ids not present in the split.
    pub extra_ids: Vec<String>,
}

/// How many missing ids an error message lists.
pub const MAX_LISTED_MISSING: usize = 20;

/// Scores `hypotheses` against every pair in `split`.
///
/// Embedding-F is computed only when it is enabled and `embeddings` is given.
pub fn evaluate_system(
    system_name: &str,
    split: &[SentencePair],
    hypotheses: &BTreeMap<String, String>,
    embeddings: Option<EmbeddingSources<'_>>,
    config: &EvalConfig,
) -> Result<Evaluation> {
    if split.is_empty() {
        return Err(Error::InvalidInput("split has no sentence pairs".into()));
    }
    let missing: Vec<&str> = split
        .iter()
        .map(|p| p.id.as_str())
        .filter(|id| !hypotheses.contains_key(*id))
        .collect();
    if !missing.is_empty() {
        let mut listed: Vec<String> = missing
            .iter()
            .take(MAX_LISTED_MISSING)
            .map(|s| String::from(*s))
            .collect();
        if missing.len() > MAX_LISTED_MISSING {
            listed.push(format!("... and {} more", missing.len() - MAX_LISTED_MISSING));
        }
        return Err(Error::IdMismatch(listed));
    }
    let split_ids: BTreeSet<&str> = split.iter().map(|p| p.id.as_str()).collect();
    let extra_ids = hypotheses
        .keys()
        .filter(|k| !split_ids.contains(k.as_str()))
        .cloned()
        .collect();

    let wants = |m: Metric| config.metrics.contains(&m);
    let embeddings = embeddings.filter(|_| wants(Metric::EmbeddingF));

    let mut per_sentence = BTreeMap::new();
    let mut bleu_total = BleuStats::default();
    for pair in split {
        if pair.refs.is_empty() {
            return Err(Error::InvalidInput(format!("pair `{}` has no references", pair.id)));
        }
        let hyp_text = &hypotheses[&pair.id];
        let hyp = tokenize(hyp_text);
        let refs: Vec<Vec<String>> = pair.refs.iter().map(|r| tokenize(r)).collect();
        let mut scores = BTreeMap::new();
        if wants(Metric::Bleu) {
            let stats = BleuStats::from_tokens(&hyp, &refs);
            bleu_total.add(&stats);
            scores.insert(Metric::Bleu, stats.score());
        }
        for (metric, variant) in [
            (Metric::Rouge1, RougeVariant::One),
            (Metric::Rouge2, RougeVariant::Two),
            (Metric::RougeL, RougeVariant::L),
        ] {
            if wants(metric) {
                let best = refs
                    .iter()
                    .map(|r| rouge::rouge_tokens(&hyp, r, variant))
                    .fold(0.0, f64::max);
                scores.insert(metric, best);
            }
        }
        if wants(Metric::Sari) {
            scores.insert(Metric::Sari, sari(&pair.src, hyp_text, &pair.refs)?);
        }
        if let Some(emb) = embeddings {
            let hyp_emb = emb.hypotheses.get(&pair.id).ok_or_else(|| Error::InvalidEmbeddings {
                id: pair.id.clone(),
                reason: "no hypothesis embeddings".into(),
            })?;
            let ref_embs = (0..pair.refs.len())
                .map(|j| {
                    let key = reference_key(&pair.id, j);
                    emb.references.get(&key).cloned().ok_or(Error::InvalidEmbeddings {
                        id: key,
                        reason: "no reference embeddings".into(),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            scores.insert(Metric::EmbeddingF, embedding_f(hyp_emb, &ref_embs)?.f);
        }
        per_sentence.insert(pair.id.clone(), scores);
    }

    let mut corpus_scores = BTreeMap::new();
    let present: BTreeSet<Metric> = per_sentence
        .values()
        .flat_map(|s: &BTreeMap<Metric, f64>| s.keys().copied())
        .collect();
    for metric in present {
        let value = if metric == Metric::Bleu {
            bleu_total.score()
        } else {
            mean(per_sentence.values().filter_map(|s| s.get(&metric).copied())).unwrap_or(0.0)
        };
        corpus_scores.insert(metric, value);
    }
    Ok(Evaluation {
        report: MetricReport {
            system_name: system_name.into(),
            corpus_scores,
            per_sentence,
            n_sentences: split.len(),
        },
        extra_ids,
    })
}

/// Plain-text table with one row per report, columns in [`Metric::ALL`] order.
/// Missing scores print as `-`.
pub fn render_table(reports: &[MetricReport]) -> String {
    let name_width = reports
        .iter()
        .map(|r| r.system_name.chars().count())
        .chain([6])
        .max()
        .unwrap_or(6);
    let mut out = String::new();
    let _ = write!(out, "{:<name_width$}", "Models");
    for m in Metric::ALL {
        let _ = write!(out, " | {:>7}", m.label());
    }
    out.push('\n');
    let rule_len = name_width + Metric::ALL.len() * 10;
    out.extend(core::iter::repeat_n('-', rule_len));
    out.push('\n');
    for r in reports {
        let _ = write!(out, "{:<name_width$}", r.system_name);
        for m in Metric::ALL {
            match r.score(m) {
                Some(v) => {
                    let _ = write!(out, " | {v:>7.2}");
                }
                None => {
                    let _ = write!(out, " | {:>7}", "-");
                }
            }
        }
        out.push('\n');
    }
    out
}
