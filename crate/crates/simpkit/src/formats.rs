//! Readers and writers for the on-disk formats.
//!
//! | file | format |
//! |------|--------|
//! | sentence pairs | JSON Lines `{"id","doc_id","src","refs"}` |
//! | dependency parses | CoNLL-U with `# sent_id = <id>` comments |
//! | frequency list | one token per line, most frequent first |
//! | token embeddings | JSON Lines `{"id","tokens","vecs"}` |
//! | predictions | JSON Lines `{"id","hyp"}` |
//! | evaluation items, ratings | JSON Lines |
//! | assignment plan, reports | JSON |
//!
//! Blank lines in JSON Lines files are ignored. Parse errors carry the
//! 1-based line number.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use simpkit_core::corpus::SentencePair;
use simpkit_core::embeddings::TokenEmbeddings;
use simpkit_core::human_eval::{AnnotationRecord, AssignmentPlan, EvalItem};
use simpkit_core::lexicon::RankTable;
use simpkit_core::parse::DepParse;

use crate::error::io_err;
use crate::{Error, Result};

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(io_err(path))
}

fn parse_error(path: &Path, line: usize, message: impl ToString) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.to_string(),
    }
}

/// Reads one JSON value per non-blank line, with its line number.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<(usize, T)>> {
    let mut out = Vec::new();
    for (i, line) in open(path)?.lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| parse_error(path, i + 1, e))?;
        out.push((i + 1, value));
    }
    Ok(out)
}

pub fn write_jsonl<'a, T: Serialize + 'a>(
    path: &Path,
    values: impl IntoIterator<Item = &'a T>,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for v in values {
        serde_json::to_writer(&mut w, v).map_err(|e| parse_error(path, 0, e))?;
        w.write_all(b"\n").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    serde_json::from_reader(open(path)?).map_err(|e| parse_error(path, e.line(), e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| parse_error(path, 0, e))?;
    text.push('\n');
    fs::write(path, text).map_err(io_err(path))
}

fn unique_by_id<T>(
    path: &Path,
    rows: Vec<(usize, T)>,
    id: impl Fn(&T) -> &str,
) -> Result<Vec<T>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(rows.len());
    for (line, row) in rows {
        if !seen.insert(id(&row).to_string()) {
            return Err(parse_error(path, line, format!("duplicate id `{}`", id(&row))));
        }
        out.push(row);
    }
    Ok(out)
}

/// Loads sentence pairs in file order. Pairs without references are kept.
pub fn load_pairs(path: &Path) -> Result<Vec<SentencePair>> {
    let rows: Vec<(usize, SentencePair)> = read_jsonl(path)?;
    for (line, p) in &rows {
        if p.src.trim().is_empty() {
            return Err(parse_error(path, *line, format!("pair `{}` has an empty source", p.id)));
        }
    }
    unique_by_id(path, rows, |p| &p.id)
}

pub fn save_pairs(path: &Path, pairs: &[SentencePair]) -> Result<()> {
    write_jsonl(path, pairs)
}

/// Parses CoNLL-U text. Multiword-token ranges and empty nodes are skipped.
pub fn parse_conllu(path: &Path, text: &str) -> Result<BTreeMap<String, DepParse>> {
    struct Pending {
        start: usize,
        id: Option<String>,
        tokens: Vec<String>,
        heads: Vec<Option<usize>>,
    }
    let mut parses = BTreeMap::new();
    let mut pending: Option<Pending> = None;
    let finish = |p: Pending, parses: &mut BTreeMap<String, DepParse>| -> Result<()> {
        let id = p
            .id
            .ok_or_else(|| parse_error(path, p.start, "sentence has no `# sent_id` comment"))?;
        if parses.contains_key(&id) {
            return Err(parse_error(path, p.start, format!("duplicate sentence id `{id}`")));
        }
        let parse = DepParse::new(id.clone(), p.tokens, p.heads).map_err(|source| Error::Invalid {
            path: path.to_path_buf(),
            source,
        })?;
        parses.insert(id, parse);
        Ok(())
    };
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            if let Some(p) = pending.take() {
                finish(p, &mut parses)?;
            }
            continue;
        }
        let p = pending.get_or_insert_with(|| Pending {
            start: line_no,
            id: None,
            tokens: Vec::new(),
            heads: Vec::new(),
        });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some((key, value)) = comment.split_once('=') {
                if key.trim() == "sent_id" {
                    p.id = Some(value.trim().to_string());
                }
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(parse_error(path, line_no, format!("expected 10 columns, found {}", cols.len())));
        }
        if cols[0].contains('-') || cols[0].contains('.') {
            continue;
        }
        let index: usize = cols[0]
            .parse()
            .map_err(|_| parse_error(path, line_no, format!("bad token id `{}`", cols[0])))?;
        if index != p.tokens.len() + 1 {
            return Err(parse_error(path, line_no, format!("token id {index} out of sequence")));
        }
        let head: usize = cols[6]
            .parse()
            .map_err(|_| parse_error(path, line_no, format!("bad head `{}`", cols[6])))?;
        p.tokens.push(cols[1].to_string());
        p.heads.push(head.checked_sub(1));
    }
    if let Some(p) = pending.take() {
        finish(p, &mut parses)?;
    }
    Ok(parses)
}

pub fn load_conllu(path: &Path) -> Result<BTreeMap<String, DepParse>> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_conllu(path, &text)
}

/// Writes parses as CoNLL-U; columns other than FORM and HEAD are `_`.
pub fn save_conllu<'a>(path: &Path, parses: impl IntoIterator<Item = &'a DepParse>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for p in parses {
        writeln!(w, "# sent_id = {}", p.sentence_id()).map_err(io_err(path))?;
        for (i, (tok, head)) in p.tokens().iter().zip(p.heads()).enumerate() {
            let head = head.map_or(0, |h| h + 1);
            let rel = if head == 0 { "root" } else { "dep" };
            writeln!(w, "{}\t{tok}\t_\t_\t_\t_\t{head}\t{rel}\t_\t_", i + 1).map_err(io_err(path))?;
        }
        writeln!(w).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Rank of a token is its 1-based line number. Trailing blank lines are
/// allowed; blank lines between tokens are not.
pub fn load_frequency_list(path: &Path) -> Result<RankTable> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let lines: Vec<&str> = text.trim_end().lines().collect();
    if let Some(i) = lines.iter().position(|l| l.trim().is_empty()) {
        return Err(parse_error(path, i + 1, "blank line in frequency list"));
    }
    RankTable::from_ranked(lines.iter().map(|l| l.trim())).map_err(|source| Error::Invalid {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_embeddings(path: &Path) -> Result<BTreeMap<String, TokenEmbeddings>> {
    let rows: Vec<(usize, TokenEmbeddings)> = read_jsonl(path)?;
    let rows = unique_by_id(path, rows, |e| e.id())?;
    Ok(rows.into_iter().map(|e| (e.id().to_string(), e)).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub id: String,
    pub hyp: String,
}

pub fn load_predictions(path: &Path) -> Result<BTreeMap<String, String>> {
    let rows: Vec<(usize, Prediction)> = read_jsonl(path)?;
    let rows = unique_by_id(path, rows, |p| &p.id)?;
    Ok(rows.into_iter().map(|p| (p.id, p.hyp)).collect())
}

pub fn save_predictions<'a>(
    path: &Path,
    predictions: impl IntoIterator<Item = (&'a str, &'a str)>,
) -> Result<()> {
    let rows: Vec<Prediction> = predictions
        .into_iter()
        .map(|(id, hyp)| Prediction {
            id: id.into(),
            hyp: hyp.into(),
        })
        .collect();
    write_jsonl(path, &rows)
}

pub fn load_items(path: &Path) -> Result<Vec<EvalItem>> {
    let rows: Vec<(usize, EvalItem)> = read_jsonl(path)?;
    unique_by_id(path, rows, |i| &i.item_id)
}

pub fn load_plan(path: &Path) -> Result<AssignmentPlan> {
    read_json(path)
}

/// Loads and validates rating records.
pub fn load_ratings(path: &Path) -> Result<Vec<AnnotationRecord>> {
    let rows: Vec<(usize, AnnotationRecord)> = read_jsonl(path)?;
    let records: Vec<AnnotationRecord> = rows.into_iter().map(|(_, r)| r).collect();
    simpkit_core::human_eval::validate_records(&records).map_err(|source| Error::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(records)
}
