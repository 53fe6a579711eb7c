//! Control-token attributes: syntactic depth ratio, word-rank ratio,
//! replace-only Levenshtein similarity and character length ratio.
//!
//! Raw attribute values are quantized to multiples of 0.05 in `[0.05, 2.00]`
//! and rendered as four tokens prefixed to the source sentence, e.g.
//! `<DEPENDENCYTREEDEPTH_0.8> <WORDRANK_0.75> <REPLACEONLYLEVENSHTEIN_0.7> <LENGTHRATIO_0.5> ...`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::corpus::{reference_key, source_key, SentencePair};
use crate::lexicon::RankTable;
use crate::math::{ln, round};
use crate::parse::DepParse;
use crate::text::{is_punctuation, tokenize};
use crate::{Error, Result};

/// Quantization step.
pub const STEP: f64 = 0.05;
/// Number of quantization bins per unit value (1 / [`STEP`]).
const BINS_PER_UNIT: f64 = 20.0;
pub const MIN_BIN: i64 = 1;
pub const MAX_BIN: i64 = 40;
pub const MIN_VALUE: f64 = MIN_BIN as f64 / BINS_PER_UNIT;
pub const MAX_VALUE: f64 = MAX_BIN as f64 / BINS_PER_UNIT;

/// Token names in rendering order.
pub const TOKEN_NAMES: [&str; 4] = [
    "DEPENDENCYTREEDEPTH",
    "WORDRANK",
    "REPLACEONLYLEVENSHTEIN",
    "LENGTHRATIO",
];

/// The four attribute values, raw or quantized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControlTokens {
    pub dtd: f64,
    pub wr: f64,
    pub lv: f64,
    pub lr: f64,
}

impl ControlTokens {
    pub const IDENTITY: ControlTokens = ControlTokens {
        dtd: 1.0,
        wr: 1.0,
        lv: 1.0,
        lr: 1.0,
    };

    pub fn values(&self) -> [f64; 4] {
        [self.dtd, self.wr, self.lv, self.lr]
    }

    pub fn quantized(&self) -> ControlTokens {
        ControlTokens {
            dtd: quantize(self.dtd),
            wr: quantize(self.wr),
            lv: quantize(self.lv),
            lr: quantize(self.lr),
        }
    }

    pub fn is_quantized(&self) -> bool {
        self.values().iter().all(|&v| quantized_bin(v).is_some())
    }
}

/// Attribute values measured on a pair, with their quantized counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CtVector {
    pub raw: ControlTokens,
    pub quantized: ControlTokens,
}

impl CtVector {
    pub fn from_raw(raw: ControlTokens) -> Self {
        Self {
            raw,
            quantized: raw.quantized(),
        }
    }
}

/// `depth(tgt) / depth(src)`, depth counted in nodes.
pub fn dep_tree_depth_ratio(src: &DepParse, tgt: &DepParse) -> f64 {
    tgt.depth() as f64 / src.depth() as f64
}

/// Third quartile of `ln(rank)` over non-punctuation tokens.
///
/// Falls back to all tokens when every token is punctuation. `None` for an
/// empty list.
pub fn lexical_complexity<S: AsRef<str>>(tokens: &[S], table: &RankTable) -> Option<f64> {
    let words: Vec<&str> = tokens
        .iter()
        .map(AsRef::as_ref)
        .filter(|t| !is_punctuation(t))
        .collect();
    let pool: Vec<&str> = if words.is_empty() {
        tokens.iter().map(AsRef::as_ref).collect()
    } else {
        words
    };
    let mut log_ranks: Vec<f64> = pool.iter().map(|t| ln(table.rank(t) as f64)).collect();
    log_ranks.sort_by(f64::total_cmp);
    quantile(&log_ranks, 0.75)
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    let last = sorted.len().checked_sub(1)?;
    let h = last as f64 * q;
    let lo = h as usize;
    let hi = (lo + 1).min(last);
    Some(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

/// `complexity(tgt) / complexity(src)`.
///
/// When the source complexity is 0 (every token has rank 1) the ratio is 1 if
/// the target is also 0 and [`MAX_VALUE`] otherwise.
pub fn word_rank_ratio<S: AsRef<str>>(src_tokens: &[S], tgt_tokens: &[S], table: &RankTable) -> Result<f64> {
    let (Some(src), Some(tgt)) = (
        lexical_complexity(src_tokens, table),
        lexical_complexity(tgt_tokens, table),
    ) else {
        return Err(Error::InvalidInput("word-rank ratio needs non-empty token lists".into()));
    };
    Ok(if src > 0.0 {
        tgt / src
    } else if tgt == 0.0 {
        1.0
    } else {
        MAX_VALUE
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EditOp {
    Match,
    Substitute,
    Delete,
    Insert,
}

/// Canonical minimal character edit script from `src` to `tgt`, in forward order.
///
/// The backtrace starts at the end of both strings and, among steps that stay
/// on a minimal path, prefers match, then substitute, then delete, then insert.
pub fn edit_script(src: &str, tgt: &str) -> Vec<EditOp> {
    let a: Vec<char> = src.chars().collect();
    let b: Vec<char> = tgt.chars().collect();
    let (n, m) = (a.len(), b.len());
    let width = m + 1;
    let mut d = vec![0usize; (n + 1) * width];
    for i in 0..=n {
        d[i * width] = i;
    }
    for j in 0..=m {
        d[j] = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = d[(i - 1) * width + j - 1] + usize::from(a[i - 1] != b[j - 1]);
            let up = d[(i - 1) * width + j] + 1;
            let left = d[i * width + j - 1] + 1;
            d[i * width + j] = diag.min(up).min(left);
        }
    }
    let at = |i: usize, j: usize| d[i * width + j];
    let mut ops = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = at(i, j);
        if i > 0 && j > 0 && a[i - 1] == b[j - 1] && here == at(i - 1, j - 1) {
            ops.push(EditOp::Match);
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && here == at(i - 1, j - 1) + 1 {
            ops.push(EditOp::Substitute);
            i -= 1;
            j -= 1;
        } else if i > 0 && here == at(i - 1, j) + 1 {
            ops.push(EditOp::Delete);
            i -= 1;
        } else {
            ops.push(EditOp::Insert);
            j -= 1;
        }
    }
    ops.reverse();
    ops
}

/// `1 - substitutions / max(|src|, |tgt|)` over the canonical edit script,
/// lengths in Unicode scalar values.
pub fn replace_only_levenshtein(src: &str, tgt: &str) -> f64 {
    let longest = src.chars().count().max(tgt.chars().count());
    if longest == 0 {
        return 1.0;
    }
    let subs = edit_script(src, tgt)
        .into_iter()
        .filter(|op| *op == EditOp::Substitute)
        .count();
    1.0 - subs as f64 / longest as f64
}

/// `|tgt| / |src|` in Unicode scalar values, spaces included.
pub fn length_ratio(src: &str, tgt: &str) -> Result<f64> {
    let src_len = src.chars().count();
    if src_len == 0 {
        return Err(Error::InvalidInput("length ratio needs a non-empty source".into()));
    }
    Ok(tgt.chars().count() as f64 / src_len as f64)
}

/// Nearest multiple of 0.05 (ties away from zero), clamped to `[0.05, 2.00]`.
pub fn quantize(v: f64) -> f64 {
    let bin = (round(v * BINS_PER_UNIT) as i64).clamp(MIN_BIN, MAX_BIN);
    bin as f64 / BINS_PER_UNIT
}

/// The bin index `k` (value `k * 0.05`) if `v` is a quantized value.
pub fn quantized_bin(v: f64) -> Option<i64> {
    if !v.is_finite() {
        return None;
    }
    let scaled = v * BINS_PER_UNIT;
    let bin = round(scaled);
    ((scaled - bin).abs() < 1e-9 && (MIN_BIN as f64..=MAX_BIN as f64).contains(&bin))
        .then_some(bin as i64)
}

/// Every quantized value, ascending.
pub fn quantized_values() -> impl Iterator<Item = f64> {
    (MIN_BIN..=MAX_BIN).map(|k| k as f64 / BINS_PER_UNIT)
}

/// Shortest decimal rendering of bin `k`: `1`, `0.8`, `0.75`.
fn format_bin(bin: i64) -> String {
    let hundredths = bin * 5;
    let (whole, frac) = (hundredths / 100, hundredths % 100);
    match frac {
        0 => format!("{whole}"),
        f if f % 10 == 0 => format!("{whole}.{}", f / 10),
        f => format!("{whole}.{f:02}"),
    }
}

/// Prefixes `src` with the four control tokens of a quantized vector.
pub fn annotate(src: &str, ct: &ControlTokens) -> Result<String> {
    let mut out = String::new();
    for (name, value) in TOKEN_NAMES.iter().zip(ct.values()) {
        let bin = quantized_bin(value).ok_or(Error::Unquantized(value))?;
        out.push('<');
        out.push_str(name);
        out.push('_');
        out.push_str(&format_bin(bin));
        out.push_str("> ");
    }
    out.push_str(src);
    Ok(out)
}

/// Splits an annotated string back into its control tokens and the source.
pub fn strip_control_tokens(annotated: &str) -> Option<(ControlTokens, &str)> {
    let mut rest = annotated;
    let mut values = [0.0; 4];
    for (name, slot) in TOKEN_NAMES.iter().zip(values.iter_mut()) {
        let body = rest.strip_prefix('<')?.strip_prefix(name)?.strip_prefix('_')?;
        let close = body.find("> ")?;
        *slot = body[..close].parse().ok()?;
        rest = &body[close + 2..];
    }
    let [dtd, wr, lv, lr] = values;
    Some((ControlTokens { dtd, wr, lv, lr }, rest))
}

/// Measures all four attributes on a source/target pair.
pub fn compute_ct(
    src: &str,
    tgt: &str,
    src_parse: &DepParse,
    tgt_parse: &DepParse,
    table: &RankTable,
) -> Result<CtVector> {
    let raw = ControlTokens {
        dtd: dep_tree_depth_ratio(src_parse, tgt_parse),
        wr: word_rank_ratio(&tokenize(src), &tokenize(tgt), table)?,
        lv: replace_only_levenshtein(src, tgt),
        lr: length_ratio(src, tgt)?,
    };
    Ok(CtVector::from_raw(raw))
}

/// One annotated training example per (pair, reference).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingExample {
    pub pair_id: String,
    pub ref_index: usize,
    pub ct: CtVector,
    pub annotated_src: String,
    pub target: String,
}

/// Measures the oracle control tokens of every (source, reference)
/// combination and annotates the source with their quantized values.
///
/// Parses are looked up by [`source_key`] and [`reference_key`].
pub fn prepare_training_set(
    pairs: &[SentencePair],
    parses: &BTreeMap<String, DepParse>,
    table: &RankTable,
) -> Result<Vec<TrainingExample>> {
    let lookup = |key: String| parses.get(&key).ok_or(Error::MissingParse(key));
    let mut out = Vec::new();
    for pair in pairs {
        let src_parse = lookup(source_key(&pair.id))?;
        for (j, reference) in pair.refs.iter().enumerate() {
            let ref_parse = lookup(reference_key(&pair.id, j))?;
            let ct = compute_ct(&pair.src, reference, src_parse, ref_parse, table)?;
            out.push(TrainingExample {
                pair_id: pair.id.clone(),
                ref_index: j,
                annotated_src: annotate(&pair.src, &ct.quantized)?,
                ct,
                target: reference.clone(),
            });
        }
    }
    Ok(out)
}
