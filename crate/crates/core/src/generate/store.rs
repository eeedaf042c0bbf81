use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

/// One model call: the prompt context, the raw reply, and the sentences
/// parsed from it. Stored one per line as JSON.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationRecord {
    pub sid: String,
    pub target: String,
    /// `family.sub_tag`, e.g. `movement.topicalization`.
    pub instruction: String,
    pub model: String,
    pub raw: String,
    pub sentences: Vec<String>,
    /// Seconds since the Unix epoch.
    pub ts: u64,
    #[serde(default)]
    pub prompt_sha256: String,
    #[serde(default)]
    pub sample: usize,
}

pub fn prompt_hash(prompt: &str) -> String {
    let digest = Sha256::digest(prompt.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Append-only JSONL store of generation records that doubles as the
/// response cache, keyed by `(model, prompt hash, sample index)`.
#[derive(Debug)]
pub struct RecordStore {
    path: Option<PathBuf>,
    records: Vec<GenerationRecord>,
    by_prompt: HashMap<(String, String, usize), usize>,
    by_sid: HashMap<(String, String, String, usize), usize>,
}

impl RecordStore {
    /// An in-memory store that is never written.
    pub fn in_memory() -> Self {
        RecordStore { path: None, records: Vec::new(), by_prompt: HashMap::new(), by_sid: HashMap::new() }
    }

    /// Open a store file; a missing file is an empty store.
    pub fn open(path: &Path) -> Result<Self> {
        let mut store = RecordStore { path: Some(path.to_path_buf()), ..RecordStore::in_memory() };
        if path.exists() {
            for rec in read_records(path)? {
                store.index(rec);
            }
        }
        Ok(store)
    }

    fn index(&mut self, rec: GenerationRecord) {
        let k = self.records.len();
        self.by_prompt.entry((rec.model.clone(), rec.prompt_sha256.clone(), rec.sample)).or_insert(k);
        self.by_sid.entry((rec.sid.clone(), rec.model.clone(), rec.prompt_sha256.clone(), rec.sample)).or_insert(k);
        self.records.push(rec);
    }

    /// Fill `prompt_sha256` on records written without one (e.g. authored by
    /// hand) and rebuild the indexes. Nothing is written back.
    pub fn fill_missing_hashes(&mut self, hash: impl Fn(&GenerationRecord) -> Option<String>) {
        let records = std::mem::take(&mut self.records);
        self.by_prompt.clear();
        self.by_sid.clear();
        for mut r in records {
            if r.prompt_sha256.is_empty() {
                if let Some(h) = hash(&r) {
                    r.prompt_sha256 = h;
                }
            }
            self.index(r);
        }
    }

    pub fn records(&self) -> &[GenerationRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn cached(&self, model: &str, prompt_sha256: &str, sample: usize) -> Option<&GenerationRecord> {
        self.by_prompt
            .get(&(model.to_string(), prompt_sha256.to_string(), sample))
            .map(|&k| &self.records[k])
    }

    pub fn has_record(&self, sid: &str, model: &str, prompt_sha256: &str, sample: usize) -> bool {
        self.by_sid.contains_key(&(sid.to_string(), model.to_string(), prompt_sha256.to_string(), sample))
    }

    /// Append records to memory and, for file-backed stores, to disk.
    pub fn append(&mut self, records: Vec<GenerationRecord>) -> Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        if let Some(path) = &self.path {
            let file = OpenOptions::new().create(true).append(true).open(path)?;
            let mut w = BufWriter::new(file);
            for rec in &records {
                serde_json::to_writer(&mut w, rec)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
        }
        records.into_iter().for_each(|r| self.index(r));
        Ok(())
    }

    /// Records of one sentence, in store order.
    pub fn for_sid<'a>(&'a self, sid: &'a str) -> impl Iterator<Item = &'a GenerationRecord> + 'a {
        self.records.iter().filter(move |r| r.sid == sid)
    }
}

pub fn read_records(path: &Path) -> Result<Vec<GenerationRecord>> {
    let reader = BufReader::new(File::open(path)?);
    let mut out = Vec::new();
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec = serde_json::from_str(&line).map_err(|e| Error::Corpus {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", k + 1),
        })?;
        out.push(rec);
    }
    Ok(out)
}
