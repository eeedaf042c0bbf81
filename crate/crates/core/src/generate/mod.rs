//! Paraphrase generation with an instruction-following model.
//!
//! Every (sentence, sub-instruction, sample) triple becomes one
//! [`GenerationRecord`] in an append-only JSONL store. The store is also
//! the response cache: a prompt already answered for the same model and
//! sample index is never sent again, and with `offline` set nothing is
//! sent at all. Scoring reads only the store.

mod client;
pub mod mock;
mod response;
mod store;
mod templates;

use std::collections::BTreeSet;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use log::{info, warn};
use rayon::prelude::*;

pub use client::{extract_content, ChatClient, Completion, LlmClientConfig, API_KEY_ENV};
pub use response::{parse_response, parse_response_with};
pub use store::{prompt_hash, read_records, GenerationRecord, RecordStore};
pub use templates::{language_name, render_instruction, template, Family, Gating, InstructionTemplate, TEMPLATES};

use crate::normalize::{Normalizer, TokenizerMode};
use crate::overlap::ParaphraseSet;
use crate::sentence::Sentence;
use crate::{Error, Result};

/// Seconds since the epoch, or `SOURCE_DATE_EPOCH` when set so that runs
/// can be byte-reproducible.
pub fn timestamp() -> u64 {
    if let Some(v) = std::env::var("SOURCE_DATE_EPOCH").ok().and_then(|v| v.parse().ok()) {
        return v;
    }
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
pub struct GenerateSummary {
    /// Calls sent to the model.
    pub requested: usize,
    /// Records written from a cached reply to the same prompt.
    pub reused: usize,
    /// Records already present for this sentence.
    pub skipped: usize,
    /// Triples with no reply (offline miss or exhausted retries).
    pub failed: usize,
}

impl std::ops::AddAssign for GenerateSummary {
    fn add_assign(&mut self, o: Self) {
        self.requested += o.requested;
        self.reused += o.reused;
        self.skipped += o.skipped;
        self.failed += o.failed;
    }
}

/// Drives generation for a language over a record store.
pub struct Generator {
    config: LlmClientConfig,
    client: Option<ChatClient>,
    language: String,
    gating: Gating,
    store: Mutex<RecordStore>,
}

impl Generator {
    /// `client = None` means offline: only cached replies are used.
    pub fn new(config: LlmClientConfig, client: Option<ChatClient>, mut store: RecordStore, language: &str, gating: Gating) -> Result<Self> {
        config.validate()?;
        language_name(language)?;
        store.fill_missing_hashes(|r| {
            let t = template(r.instruction.split_once('.')?.1).filter(|t| t.tag() == r.instruction)?;
            render_instruction(t, language, &r.target).ok().map(|p| prompt_hash(&p))
        });
        Ok(Generator { config, client, language: language.to_string(), gating, store: Mutex::new(store) })
    }

    pub fn into_store(self) -> RecordStore {
        self.store.into_inner().expect("store poisoned")
    }

    pub fn templates(&self, families: &BTreeSet<Family>) -> Vec<&'static InstructionTemplate> {
        self.gating.select(families, &self.language)
    }

    fn tokenizer_mode(&self) -> TokenizerMode {
        if self.language == "zh" { TokenizerMode::Character } else { TokenizerMode::Whitespace }
    }

    /// New records for one sentence; nothing is written.
    fn generate_one(&self, sid: &str, target: &str, families: &BTreeSet<Family>) -> Result<(Vec<GenerationRecord>, GenerateSummary)> {
        let mut out = Vec::new();
        let mut summary = GenerateSummary::default();
        let model = &self.config.model;
        for t in self.templates(families) {
            let prompt = render_instruction(t, &self.language, target)?;
            let hash = prompt_hash(&prompt);
            for sample in 0..self.config.samples_per_instruction {
                let cached = {
                    let store = self.store.lock().expect("store poisoned");
                    if store.has_record(sid, model, &hash, sample) {
                        summary.skipped += 1;
                        continue;
                    }
                    store.cached(model, &hash, sample).map(|r| r.raw.clone())
                };
                let raw = match (cached, &self.client) {
                    (Some(raw), _) => {
                        summary.reused += 1;
                        raw
                    }
                    (None, None) => {
                        summary.failed += 1;
                        continue;
                    }
                    (None, Some(client)) => match client.complete(&prompt) {
                        Ok(c) => {
                            info!("sid {sid} {}: {} attempt(s)", t.tag(), c.attempts);
                            summary.requested += 1;
                            c.text
                        }
                        Err(e @ (Error::Transport(_) | Error::Protocol(_))) => {
                            warn!("sid {sid} {}: {e}", t.tag());
                            summary.failed += 1;
                            continue;
                        }
                        Err(e) => return Err(e),
                    },
                };
                out.push(GenerationRecord {
                    sid: sid.to_string(),
                    target: target.to_string(),
                    instruction: t.tag(),
                    model: model.clone(),
                    sentences: parse_response_with(&raw, self.tokenizer_mode()),
                    raw,
                    ts: timestamp(),
                    prompt_sha256: hash.clone(),
                    sample,
                });
            }
        }
        Ok((out, summary))
    }

    /// Generate for every `(sid, target text)` pair, `jobs` sentences at a
    /// time. Records are appended in input order after each batch, so an
    /// interrupted run resumes where it stopped.
    pub fn run(&self, targets: &[(String, String)], families: &BTreeSet<Family>, jobs: usize) -> Result<GenerateSummary> {
        if families.is_empty() {
            return Err(Error::Config("no instruction families selected".into()));
        }
        let jobs = jobs.max(1);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?;
        let mut total = GenerateSummary::default();
        for batch in targets.chunks(jobs * 4) {
            let results: Vec<Result<_>> = pool.install(|| {
                batch.par_iter().map(|(sid, text)| self.generate_one(sid, text, families)).collect()
            });
            let mut new_records = Vec::new();
            for r in results {
                let (records, summary) = r?;
                total += summary;
                new_records.extend(records);
            }
            self.store.lock().expect("store poisoned").append(new_records)?;
        }
        Ok(total)
    }

    /// Paraphrase set of one sentence from the records already in the store.
    pub fn paraphrase_set(&self, sid: &str, families: &BTreeSet<Family>, normalizer: &Normalizer) -> ParaphraseSet {
        let tags: BTreeSet<String> = self.templates(families).iter().map(|t| t.tag()).collect();
        let store = self.store.lock().expect("store poisoned");
        let records = store.for_sid(sid).filter(|r| r.model == self.config.model && tags.contains(&r.instruction));
        paraphrase_set_from_records(sid, records, normalizer)
    }
}

/// Normalize every parsed sentence of `records` into a paraphrase set.
/// Sentences that normalize to nothing are skipped.
pub fn paraphrase_set_from_records<'a>(
    sid: &str,
    records: impl IntoIterator<Item = &'a GenerationRecord>,
    normalizer: &Normalizer,
) -> ParaphraseSet {
    let mut set = ParaphraseSet::new(sid);
    for rec in records {
        for sentence in &rec.sentences {
            let tokens = normalizer.normalize_text(sentence);
            if !tokens.is_empty() {
                set.push(rec.instruction.clone(), tokens);
            }
        }
    }
    set
}

/// Target text sent to the model: the raw tokens joined by spaces.
pub fn target_text(sentence: &Sentence) -> String {
    sentence.raw_tokens.join(" ")
}

/// Render, request (or read from cache), parse, tokenize and normalize the
/// paraphrases of one sentence. A sentence for which every request failed
/// gets an empty set.
pub fn build_paraphrase_set(
    generator: &Generator,
    sentence: &Sentence,
    families: &BTreeSet<Family>,
    normalizer: &Normalizer,
) -> Result<ParaphraseSet> {
    generator.run(&[(sentence.id.clone(), target_text(sentence))], families, 1)?;
    Ok(generator.paraphrase_set(&sentence.id, families, normalizer))
}
