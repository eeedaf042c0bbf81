//! Corpus-level glue: prepare gold trees, rebuild paraphrase sets from the
//! record store, score, decode and evaluate.

use std::collections::{BTreeMap, BTreeSet};

use log::warn;
use rayon::prelude::*;

use crate::analyze::random_score_chart;
use crate::chart::ScoreChart;
use crate::decode::viterbi_parse;
use crate::evaluate::{corpus_sf1_trees, CorpusReport, EvalFilter};
use crate::generate::{paraphrase_set_from_records, GenerationRecord};
use crate::normalize::Normalizer;
use crate::overlap::{score_chart, ChartOptions, MatchScorer, ParaphraseSet};
use crate::sentence::Sentence;
use crate::tree::LabeledTree;
use crate::treebank::{normalize_labels, strip_punctuation, Corpus, CorpusEntry, LabelMap, PunctSpec};
use crate::{Error, Result};

/// Strip punctuation, merge labels and normalize the remaining tokens of
/// every gold tree. Sentences left empty are dropped and their ids returned.
pub fn prepare_corpus(corpus: &Corpus, punct: &PunctSpec, labels: &LabelMap, normalizer: &Normalizer) -> Result<(Corpus, Vec<String>)> {
    let mut entries = Vec::with_capacity(corpus.len());
    let mut dropped = Vec::new();
    for e in &corpus.entries {
        let tree = match strip_punctuation(&e.tree, punct) {
            Ok(s) => normalize_labels(&s.tree, labels),
            Err(Error::EmptySentence) => {
                warn!("sid {}: only punctuation, dropped", e.sentence.id);
                dropped.push(e.sentence.id.clone());
                continue;
            }
            Err(err) => return Err(err),
        };
        let tokens = tree.tokens().into_iter().map(String::from).collect();
        let sentence = normalizer.sentence(e.sentence.id.clone(), tokens)?;
        entries.push(CorpusEntry { sentence, tree });
    }
    Ok((Corpus { language: corpus.language.clone(), split: corpus.split.clone(), entries }, dropped))
}

/// How span scores are produced.
#[derive(Debug, Clone, PartialEq)]
pub enum ScorerKind {
    Match(MatchScorer),
    /// Uniform random scores keyed by (seed, sentence id, span).
    Random { seed: u64 },
}

impl ScorerKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScorerKind::Match(m) => m.name(),
            ScorerKind::Random { .. } => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseOptions {
    pub scorer: ScorerKind,
    pub chart: ChartOptions,
}

impl Default for ParseOptions {
    fn default() -> Self {
        ParseOptions {
            scorer: ScorerKind::Match(MatchScorer::Exact),
            chart: ChartOptions { empty_fallback: true, dedup: false },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedSentence {
    pub sid: String,
    /// Binary tree over the sentence tokens.
    pub tree: LabeledTree,
    pub chart: ScoreChart,
    pub total_score: f64,
    /// The paraphrase set was empty and an all-zero chart was used.
    pub fallback: bool,
}

pub fn parse_sentence(sentence: &Sentence, set: &ParaphraseSet, opts: &ParseOptions) -> Result<ParsedSentence> {
    let chart = match &opts.scorer {
        ScorerKind::Match(m) => score_chart(sentence, set, m, opts.chart)?,
        ScorerKind::Random { seed } => random_score_chart(sentence.len(), *seed, &sentence.id)?,
    };
    let fallback = set.is_empty() && matches!(opts.scorer, ScorerKind::Match(_));
    let decoded = viterbi_parse(&chart)?;
    Ok(ParsedSentence {
        sid: sentence.id.clone(),
        tree: decoded.tree_with_tokens(&sentence.raw_tokens),
        chart,
        total_score: decoded.total_score,
        fallback,
    })
}

/// Parse every sentence of a prepared corpus. Sentences without an entry in
/// `sets` get an empty set. Output follows corpus order.
pub fn parse_corpus(corpus: &Corpus, sets: &BTreeMap<String, ParaphraseSet>, opts: &ParseOptions, jobs: usize) -> Result<Vec<ParsedSentence>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Config(e.to_string()))?;
    let empty = ParaphraseSet::default();
    pool.install(|| {
        corpus
            .entries
            .par_iter()
            .map(|e| parse_sentence(&e.sentence, sets.get(&e.sentence.id).unwrap_or(&empty), opts))
            .collect()
    })
}

/// Group store records by sentence id into paraphrase sets, keeping only
/// `tags` and, if given, one model.
pub fn paraphrase_sets(
    records: &[GenerationRecord],
    tags: &BTreeSet<String>,
    model: Option<&str>,
    normalizer: &Normalizer,
) -> BTreeMap<String, ParaphraseSet> {
    let mut by_sid: BTreeMap<&str, Vec<&GenerationRecord>> = BTreeMap::new();
    for r in records {
        if tags.contains(&r.instruction) && model.is_none_or(|m| m == r.model) {
            by_sid.entry(r.sid.as_str()).or_default().push(r);
        }
    }
    by_sid
        .into_iter()
        .map(|(sid, recs)| (sid.to_string(), paraphrase_set_from_records(sid, recs, normalizer)))
        .collect()
}

/// Evaluate parsed sentences against the prepared corpus.
pub fn evaluate_parsed(parsed: &[ParsedSentence], gold: &Corpus, f: &EvalFilter) -> Result<CorpusReport> {
    let preds: BTreeMap<String, LabeledTree> = parsed.iter().map(|p| (p.sid.clone(), p.tree.clone())).collect();
    corpus_sf1_trees(&preds, gold, f)
}
