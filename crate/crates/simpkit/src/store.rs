//! Append-only JSON Lines store for rating records.
//!
//! Each accepted submission is written and synced to disk before the caller
//! is told it succeeded. On open the whole file is replayed to rebuild the
//! uniqueness index; a torn final line left by a crash during a write was
//! never acknowledged and is truncated away.

use std::collections::BTreeSet;
use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use simpkit_core::human_eval::{AnnotationRecord, Slot};

use crate::error::io_err;
use crate::{Error, Result};

#[derive(Debug, thiserror::Error)]
pub enum AppendError {
    #[error("rating for item `{item_id}` by `{annotator_id}` slot {slot:?} already stored")]
    Duplicate {
        item_id: String,
        annotator_id: String,
        slot: Slot,
    },
    #[error(transparent)]
    Invalid(#[from] simpkit_core::Error),
    #[error(transparent)]
    Io(#[from] Error),
}

type Key = (String, String, Slot);

fn key(r: &AnnotationRecord) -> Key {
    (r.item_id.clone(), r.annotator_id.clone(), r.slot)
}

pub struct RatingStore {
    path: PathBuf,
    file: File,
    records: Vec<AnnotationRecord>,
    index: BTreeSet<Key>,
}

impl RatingStore {
    /// Opens or creates the store at `path` and replays its contents.
    pub fn open(path: &Path) -> Result<Self> {
        let bytes = match fs::read(path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Vec::new(),
            Err(e) => return Err(io_err(path)(e)),
        };
        let complete = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let mut records = Vec::new();
        let mut index = BTreeSet::new();
        for (i, line) in bytes[..complete].split(|&b| b == b'\n').enumerate() {
            if line.iter().all(u8::is_ascii_whitespace) {
                continue;
            }
            let parse = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                message,
            };
            let record: AnnotationRecord =
                serde_json::from_slice(line).map_err(|e| parse(e.to_string()))?;
            record.validate().map_err(|e| parse(e.to_string()))?;
            if !index.insert(key(&record)) {
                return Err(parse(format!("duplicate rating for item `{}`", record.item_id)));
            }
            records.push(record);
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(io_err(path))?;
        if complete < bytes.len() {
            log::warn!(
                "{}: dropping {} bytes of an unfinished write",
                path.display(),
                bytes.len() - complete
            );
            file.set_len(complete as u64).map_err(io_err(path))?;
            file.sync_all().map_err(io_err(path))?;
        }
        Ok(Self {
            path: path.to_path_buf(),
            file,
            records,
            index,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> &[AnnotationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn contains(&self, item_id: &str, annotator_id: &str, slot: Slot) -> bool {
        self.index
            .contains(&(item_id.to_string(), annotator_id.to_string(), slot))
    }

    /// Appends all of `batch` or none of it, and syncs before returning.
    pub fn append(&mut self, batch: &[AnnotationRecord]) -> Result<(), AppendError> {
        let mut fresh = BTreeSet::new();
        for r in batch {
            r.validate()?;
            let k = key(r);
            if self.index.contains(&k) || !fresh.insert(k) {
                return Err(AppendError::Duplicate {
                    item_id: r.item_id.clone(),
                    annotator_id: r.annotator_id.clone(),
                    slot: r.slot,
                });
            }
        }
        let mut buf = Vec::new();
        for r in batch {
            serde_json::to_writer(&mut buf, r).expect("records serialize");
            buf.push(b'\n');
        }
        let io = |e| AppendError::Io(io_err(&self.path)(e));
        self.file.write_all(&buf).map_err(io)?;
        self.file.sync_data().map_err(io)?;
        self.index.extend(fresh);
        self.records.extend_from_slice(batch);
        Ok(())
    }
}
