//! Score distributions by phrase type, constituent identification, random
//! baselines and instruction ablations.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chart::ScoreChart;
use crate::evaluate::EvalFilter;
use crate::generate::{Family, Gating, GenerationRecord};
use crate::normalize::Normalizer;
use crate::pipeline::{evaluate_parsed, paraphrase_sets, parse_corpus, ParseOptions, ParsedSentence};
use crate::span::{enumerate_spans, is_partial_overlap, Span};
use crate::treebank::Corpus;
use crate::{Error, Result};

/// Population skewness `m3 / m2^1.5` with `m_k` the k-th central moment.
pub fn skewness(values: &[f64]) -> Result<f64> {
    if values.len() < 3 {
        return Err(Error::Undefined(format!("skewness of {} values", values.len())));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = values.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let scale = values.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    if m2 <= (f64::EPSILON * scale).powi(2) {
        return Err(Error::Undefined("skewness of constant values".into()));
    }
    Ok(m3 / m2.powf(1.5))
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Stream for a keyed draw: the same key always yields the same values,
/// whatever order keys are visited in.
fn keyed_rng(seed: u64, sid: &str, a: u64, b: u64) -> ChaCha8Rng {
    // FNV-1a over the sentence id and the two counters.
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for byte in sid.bytes().chain(a.to_le_bytes()).chain(b.to_le_bytes()) {
        h ^= u64::from(byte);
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(h);
    rng
}

/// Chart of i.i.d. uniform `[0, 1)` scores, one keyed draw per span.
pub fn random_score_chart(n: usize, seed: u64, sid: &str) -> Result<ScoreChart> {
    ScoreChart::from_fn(n, |s| keyed_rng(seed, sid, s.i as u64, s.j as u64).gen::<f64>())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhraseClassMap {
    pub participant_labels: BTreeSet<String>,
    pub event_labels: BTreeSet<String>,
    /// Rows with fewer spans are not emitted. 0 disables the threshold.
    pub min_occurrences: usize,
}

impl Default for PhraseClassMap {
    fn default() -> Self {
        let set = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        PhraseClassMap {
            participant_labels: set(&["NP", "PP", "AP", "QP"]),
            event_labels: set(&["S", "VP", "IP", "CP"]),
            min_occurrences: 21,
        }
    }
}

impl PhraseClassMap {
    pub fn validate(&self) -> Result<()> {
        if let Some(l) = self.participant_labels.intersection(&self.event_labels).next() {
            return Err(Error::Config(format!("label {l} is both a participant and an event label")));
        }
        Ok(())
    }
}

pub const PARTICIPANT_GROUP: &str = "participant";
pub const EVENT_GROUP: &str = "event";
pub const RANDOM_GROUP: &str = "random";
pub const ALL_LENGTHS: &str = "all";

/// Length bucket label: exact lengths 2..10, then `11+`.
pub fn length_bucket(width: usize) -> String {
    if width > 10 { "11+".into() } else { width.to_string() }
}

fn bucket_order(b: &str) -> usize {
    match b {
        ALL_LENGTHS => 0,
        "11+" => 11,
        _ => b.parse().unwrap_or(12),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreStatsRow {
    pub group: String,
    pub bucket: String,
    pub count: usize,
    pub mean: f64,
    /// Absent for fewer than three values or zero variance.
    pub skewness: Option<f64>,
}

fn check_aligned(corpus: &Corpus, charts: &[ScoreChart]) -> Result<()> {
    if corpus.len() != charts.len() {
        return Err(Error::Mismatch(format!("{} charts for {} sentences", charts.len(), corpus.len())));
    }
    for (e, c) in corpus.entries.iter().zip(charts) {
        if e.tree.len() != c.n() {
            return Err(Error::Mismatch(format!(
                "sentence {}: chart over {} tokens, tree has {}",
                e.sentence.id,
                c.n(),
                e.tree.len()
            )));
        }
    }
    Ok(())
}

/// Labeled gold constituents of width >= 2, one per (span, label).
fn labeled_constituents(corpus: &Corpus) -> Vec<Vec<(Span, String)>> {
    corpus
        .entries
        .iter()
        .map(|e| {
            e.tree
                .tree_to_spans()
                .into_iter()
                .filter(|ls| ls.span.width() >= 2)
                .map(|ls| (ls.span, ls.label))
                .collect()
        })
        .collect()
}

/// For every gold constituent of width `L` in a sentence, one uniformly drawn
/// span of width `L` from the same sentence. Returned per sentence.
pub fn length_matched_random_spans(corpus: &Corpus, seed: u64) -> Vec<Vec<Span>> {
    corpus
        .entries
        .iter()
        .zip(labeled_constituents(corpus))
        .map(|(e, cons)| {
            let n = e.tree.len();
            cons.iter()
                .enumerate()
                .map(|(k, (s, _))| {
                    let w = s.width();
                    let start = keyed_rng(seed, &e.sentence.id, k as u64, u64::MAX).gen_range(1..=n - w + 1);
                    Span::of(start, start + w - 1)
                })
                .collect()
        })
        .collect()
}

/// Mean and skewness of gold constituent scores per label, per class
/// (participant/event) and, with `random_seed`, for length-matched random
/// spans, each overall and per length bucket.
pub fn score_stats_by_label(
    corpus: &Corpus,
    charts: &[ScoreChart],
    map: &PhraseClassMap,
    random_seed: Option<u64>,
) -> Result<Vec<ScoreStatsRow>> {
    check_aligned(corpus, charts)?;
    map.validate()?;
    // group -> bucket -> scores
    let mut groups: BTreeMap<String, BTreeMap<String, Vec<f64>>> = BTreeMap::new();
    let mut add = |group: &str, width: usize, v: f64| {
        let g = groups.entry(group.to_string()).or_default();
        g.entry(ALL_LENGTHS.into()).or_default().push(v);
        g.entry(length_bucket(width)).or_default().push(v);
    };
    for (cons, chart) in labeled_constituents(corpus).iter().zip(charts) {
        for (span, label) in cons {
            let v = chart.get(*span);
            add(&format!("label:{label}"), span.width(), v);
            if map.participant_labels.contains(label) {
                add(PARTICIPANT_GROUP, span.width(), v);
            } else if map.event_labels.contains(label) {
                add(EVENT_GROUP, span.width(), v);
            }
        }
    }
    if let Some(seed) = random_seed {
        for (spans, chart) in length_matched_random_spans(corpus, seed).iter().zip(charts) {
            for s in spans {
                add(RANDOM_GROUP, s.width(), chart.get(*s));
            }
        }
    }
    let mut rows = Vec::new();
    for (group, buckets) in groups {
        let mut buckets: Vec<_> = buckets.into_iter().collect();
        buckets.sort_by_key(|(b, _)| bucket_order(b));
        for (bucket, values) in buckets {
            if values.len() < map.min_occurrences.max(1) {
                continue;
            }
            rows.push(ScoreStatsRow {
                group: group.clone(),
                bucket,
                count: values.len(),
                mean: mean(&values),
                skewness: skewness(&values).ok(),
            });
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProportionRow {
    pub scorer: String,
    pub bucket: String,
    pub identified: usize,
    pub total: usize,
    pub proportion: f64,
}

/// Whether `span` scores strictly above every span that partially overlaps
/// it. Spans with no partial overlap are vacuously identified.
pub fn is_identified(chart: &ScoreChart, span: Span) -> bool {
    let v = chart.get(span);
    enumerate_spans(chart.n())
        .unwrap_or_default()
        .into_iter()
        .filter(|o| is_partial_overlap(*o, span))
        .all(|o| chart.get(o) < v)
}

/// Share of non-trivial gold constituents identified by their chart, overall
/// and, with `by_length`, per length bucket.
pub fn identification_proportion(charts: &[ScoreChart], corpus: &Corpus, scorer_tag: &str, by_length: bool) -> Result<Vec<ProportionRow>> {
    check_aligned(corpus, charts)?;
    let mut counts: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for (e, chart) in corpus.entries.iter().zip(charts) {
        let n = e.tree.len();
        for span in e.tree.spans().into_iter().filter(|s| !s.is_trivial(n)) {
            let hit = usize::from(is_identified(chart, span));
            let mut bump = |k: String| {
                let c = counts.entry(k).or_default();
                c.0 += hit;
                c.1 += 1;
            };
            bump(ALL_LENGTHS.into());
            if by_length {
                bump(length_bucket(span.width()));
            }
        }
    }
    let mut rows: Vec<_> = counts
        .into_iter()
        .map(|(bucket, (identified, total))| ProportionRow {
            scorer: scorer_tag.to_string(),
            bucket,
            identified,
            total,
            proportion: identified as f64 / total as f64,
        })
        .collect();
    rows.sort_by_key(|r| bucket_order(&r.bucket));
    Ok(rows)
}

/// Identification proportion of seeded random charts, pooled over `seeds`.
/// Every seed sees the same constituents, so the pooled proportion is the
/// mean of the per-seed proportions.
pub fn random_identification_proportion(corpus: &Corpus, seeds: &[u64], by_length: bool) -> Result<Vec<ProportionRow>> {
    let mut pooled: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    for &seed in seeds {
        let charts = corpus
            .entries
            .iter()
            .map(|e| random_score_chart(e.tree.len(), seed, &e.sentence.id))
            .collect::<Result<Vec<_>>>()?;
        for row in identification_proportion(&charts, corpus, RANDOM_GROUP, by_length)? {
            let c = pooled.entry(row.bucket).or_default();
            c.0 += row.identified;
            c.1 += row.total;
        }
    }
    let mut rows: Vec<_> = pooled
        .into_iter()
        .map(|(bucket, (identified, total))| ProportionRow {
            scorer: RANDOM_GROUP.to_string(),
            bucket,
            identified,
            total,
            proportion: identified as f64 / total as f64,
        })
        .collect();
    rows.sort_by_key(|r| bucket_order(&r.bucket));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    /// Family names joined by `+`, or `all`.
    pub families: String,
    pub mean_sf1: f64,
    pub evaluated: usize,
    /// Sentences scored with the all-zero fallback chart.
    pub fallback_sentences: usize,
}

/// Everything an ablation needs besides the family subsets.
pub struct AblationInput<'a> {
    pub corpus: &'a Corpus,
    pub records: &'a [GenerationRecord],
    pub model: Option<&'a str>,
    pub normalizer: &'a Normalizer,
    pub gating: &'a Gating,
    pub parse: &'a ParseOptions,
    pub filter: &'a EvalFilter,
    pub jobs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AblationOutcome {
    pub row: AblationRow,
    pub parsed: Vec<ParsedSentence>,
}

/// Re-score, re-decode and re-evaluate with paraphrases restricted to each
/// family subset.
pub fn ablation_run(input: &AblationInput, subsets: &[BTreeSet<Family>]) -> Result<Vec<AblationOutcome>> {
    let mut rows = Vec::with_capacity(subsets.len());
    for subset in subsets {
        if subset.is_empty() {
            return Err(Error::Config("empty instruction family subset".into()));
        }
        let tags: BTreeSet<String> = input.gating.select(subset, &input.corpus.language).iter().map(|t| t.tag()).collect();
        let sets = paraphrase_sets(input.records, &tags, input.model, input.normalizer);
        let parsed = parse_corpus(input.corpus, &sets, input.parse, input.jobs)?;
        let report = evaluate_parsed(&parsed, input.corpus, input.filter)?;
        let row = AblationRow {
            families: if subset.len() == Family::ALL.len() {
                "all".to_string()
            } else {
                subset.iter().map(|f| f.name()).collect::<Vec<_>>().join("+")
            },
            mean_sf1: report.mean_sf1,
            evaluated: report.evaluated,
            fallback_sentences: parsed.iter().filter(|p| p.fallback).count(),
        };
        rows.push(AblationOutcome { row, parsed });
    }
    Ok(rows)
}
