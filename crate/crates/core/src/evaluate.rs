//! Unlabeled sentence-level F1.
//!
//! Gold trees are expected to be punctuation-stripped already. Scores are
//! averaged uniformly over sentences, not micro-averaged over spans.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use serde::Serialize;

use crate::span::Span;
use crate::tree::LabeledTree;
use crate::treebank::{parse_bracketed_with, strip_punctuation, Corpus, ParseMode, PunctSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EvalFilter {
    /// Drop width-1 spans and the whole-sentence span.
    pub drop_trivial: bool,
    /// Count repeated spans once. Span sets already do this; the flag is kept
    /// so reports state the protocol.
    pub drop_duplicates: bool,
    pub min_sentence_len: usize,
}

impl Default for EvalFilter {
    fn default() -> Self {
        EvalFilter { drop_trivial: true, drop_duplicates: true, min_sentence_len: 2 }
    }
}

pub fn filter_spans(spans: impl IntoIterator<Item = Span>, n: usize, f: &EvalFilter) -> BTreeSet<Span> {
    spans.into_iter().filter(|s| !(f.drop_trivial && s.is_trivial(n))).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of two filtered span sets. Two empty sets score
/// 1 and exactly one empty set scores 0.
pub fn sentence_prf(pred: &BTreeSet<Span>, gold: &BTreeSet<Span>) -> Prf {
    match (pred.is_empty(), gold.is_empty()) {
        (true, true) => return Prf { precision: 1.0, recall: 1.0, f1: 1.0 },
        (true, false) | (false, true) => return Prf { precision: 0.0, recall: 0.0, f1: 0.0 },
        _ => {}
    }
    let hit = pred.intersection(gold).count() as f64;
    let precision = hit / pred.len() as f64;
    let recall = hit / gold.len() as f64;
    let f1 = if hit == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    Prf { precision, recall, f1 }
}

pub fn sentence_f1(pred: &BTreeSet<Span>, gold: &BTreeSet<Span>) -> f64 {
    sentence_prf(pred, gold).f1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SentenceReport {
    pub sid: String,
    pub len: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    /// Set when the sentence does not enter the mean.
    pub skipped_reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub mean_sf1: f64,
    pub evaluated: usize,
    pub skipped: usize,
    /// Evaluated sentences whose prediction could not be used; they score 0.
    pub failed: usize,
    pub filter: EvalFilter,
    #[serde(skip)]
    pub sentences: Vec<SentenceReport>,
}

impl CorpusReport {
    pub fn f1_of(&self, sid: &str) -> Option<f64> {
        self.sentences.iter().find(|s| s.sid == sid).and_then(|s| s.f1)
    }
}

/// Per-sentence prediction outcome fed to the aggregator.
enum Outcome {
    Spans(BTreeSet<Span>),
    Failed(String),
}

fn aggregate(gold: &Corpus, mut predict: impl FnMut(usize) -> Outcome, f: &EvalFilter) -> Result<CorpusReport> {
    let mut sentences = Vec::with_capacity(gold.len());
    let (mut sum, mut evaluated, mut failed) = (0.0, 0, 0);
    for (k, entry) in gold.entries.iter().enumerate() {
        let sid = entry.sentence.id.clone();
        let n = entry.tree.len();
        if n < f.min_sentence_len {
            sentences.push(SentenceReport {
                sid,
                len: n,
                precision: None,
                recall: None,
                f1: None,
                skipped_reason: Some(format!("length {n} below {}", f.min_sentence_len)),
            });
            continue;
        }
        let prf = match predict(k) {
            Outcome::Spans(pred) => sentence_prf(&filter_spans(pred, n, f), &filter_spans(entry.tree.spans(), n, f)),
            Outcome::Failed(why) => {
                warn!("sid {sid}: {why}; scored 0");
                failed += 1;
                Prf { precision: 0.0, recall: 0.0, f1: 0.0 }
            }
        };
        sum += prf.f1;
        evaluated += 1;
        sentences.push(SentenceReport {
            sid,
            len: n,
            precision: Some(prf.precision),
            recall: Some(prf.recall),
            f1: Some(prf.f1),
            skipped_reason: None,
        });
    }
    if evaluated == 0 {
        return Err(Error::NothingToEvaluate(format!(
            "no sentence of length >= {} among {}",
            f.min_sentence_len,
            gold.len()
        )));
    }
    Ok(CorpusReport {
        mean_sf1: sum / evaluated as f64,
        evaluated,
        skipped: sentences.len() - evaluated,
        failed,
        filter: *f,
        sentences,
    })
}

/// Mean SF1 of predicted span sets keyed by sentence id against a
/// punctuation-stripped gold corpus.
pub fn corpus_sf1(predictions: &BTreeMap<String, BTreeSet<Span>>, gold: &Corpus, f: &EvalFilter) -> Result<CorpusReport> {
    for sid in predictions.keys() {
        if gold.get(sid).is_none() {
            return Err(Error::Mismatch(format!("prediction for unknown sentence id {sid}")));
        }
    }
    for e in &gold.entries {
        let n = e.tree.len();
        match predictions.get(&e.sentence.id) {
            None => return Err(Error::Mismatch(format!("no prediction for sentence id {}", e.sentence.id))),
            Some(p) => {
                if let Some(bad) = p.iter().find(|s| s.j > n) {
                    return Err(Error::Mismatch(format!(
                        "sentence {}: span {bad} outside a sentence of length {n}",
                        e.sentence.id
                    )));
                }
            }
        }
    }
    aggregate(gold, |k| Outcome::Spans(predictions[&gold.entries[k].sentence.id].clone()), f)
}

/// Convenience for tree predictions.
pub fn corpus_sf1_trees(predictions: &BTreeMap<String, LabeledTree>, gold: &Corpus, f: &EvalFilter) -> Result<CorpusReport> {
    let spans = predictions.iter().map(|(k, t)| (k.clone(), t.spans())).collect();
    corpus_sf1(&spans, gold, f)
}

/// What to do when a predicted tree's leaves disagree with the gold tokens.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum LeafMatch {
    /// Malformed trees and leaf-count mismatches score 0.
    #[default]
    Strict,
    /// Recover malformed trees and keep only predicted spans inside the
    /// longest common prefix of predicted and gold tokens.
    Lenient,
}

/// Evaluate externally produced bracketed trees, one per line in corpus
/// order, against a punctuation-stripped gold corpus. Punctuation is
/// stripped from the predictions with `punct`.
pub fn evaluate_external(pred_text: &str, gold: &Corpus, punct: &PunctSpec, f: &EvalFilter, mode: LeafMatch) -> Result<CorpusReport> {
    let mut lines: Vec<&str> = pred_text.lines().collect();
    while lines.last().is_some_and(|l| l.trim().is_empty()) {
        lines.pop();
    }
    if lines.len() != gold.len() {
        warn!("{} prediction lines for {} gold sentences", lines.len(), gold.len());
    }
    let parse_mode = match mode {
        LeafMatch::Strict => ParseMode::Strict,
        LeafMatch::Lenient => ParseMode::Recover,
    };
    aggregate(
        gold,
        |k| {
            let Some(line) = lines.get(k) else {
                return Outcome::Failed("no prediction line".into());
            };
            let tree = match parse_bracketed_with(line, parse_mode).and_then(|t| strip_punctuation(&t, punct)) {
                Ok(s) => s.tree,
                Err(e) => return Outcome::Failed(format!("unusable prediction: {e}")),
            };
            let gold_tokens = gold.entries[k].tree.tokens();
            let pred_tokens = tree.tokens();
            if pred_tokens.len() == gold_tokens.len() {
                return Outcome::Spans(tree.spans());
            }
            match mode {
                LeafMatch::Strict => Outcome::Failed(format!(
                    "{} predicted leaves for {} gold tokens",
                    pred_tokens.len(),
                    gold_tokens.len()
                )),
                LeafMatch::Lenient => {
                    let prefix = pred_tokens.iter().zip(&gold_tokens).take_while(|(a, b)| a == b).count();
                    Outcome::Spans(tree.spans().into_iter().filter(|s| s.j <= prefix).collect())
                }
            }
        },
        f,
    )
}
