//! Span-overlap scoring.
//!
//! The score of span `(i, j)` is the fraction of paraphrases that contain
//! the normalized word sequence `w[i..=j]` as a contiguous token
//! subsequence. The fuzzy generalization replaces containment by the best
//! match score `f` over same-length windows of each paraphrase.

mod exact;
mod matchers;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

pub use exact::{exact_span_score, span_hit_count, WindowIndex};
pub use matchers::{bleu_match, meteor_alignment, meteor_match, BleuParams, MatchScorer, MeteorParams};

use crate::chart::ScoreChart;
use crate::sentence::Sentence;
use crate::span::Span;
use crate::{Error, Result};

/// One generated sentence, normalized, tagged with the instruction that
/// produced it (e.g. `movement.topicalization`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParaphraseItem {
    pub tag: String,
    pub tokens: Vec<String>,
}

/// The multiset of paraphrases of one target sentence. Duplicates are kept
/// and each counts towards the denominator.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParaphraseSet {
    pub target_id: String,
    pub items: Vec<ParaphraseItem>,
}

impl ParaphraseSet {
    pub fn new(target_id: impl Into<String>) -> Self {
        ParaphraseSet { target_id: target_id.into(), items: Vec::new() }
    }

    pub fn push(&mut self, tag: impl Into<String>, tokens: Vec<String>) {
        self.items.push(ParaphraseItem { tag: tag.into(), tokens });
    }

    pub fn size(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    /// Keep only items whose instruction family (the tag prefix before the
    /// first `.`) is in `families`.
    pub fn filter_families(&self, families: &BTreeSet<String>) -> ParaphraseSet {
        ParaphraseSet {
            target_id: self.target_id.clone(),
            items: self
                .items
                .iter()
                .filter(|it| families.contains(it.tag.split('.').next().unwrap_or("")))
                .cloned()
                .collect(),
        }
    }

    /// Keep only items whose full tag is in `tags`.
    pub fn filter_tags(&self, tags: &BTreeSet<String>) -> ParaphraseSet {
        ParaphraseSet {
            target_id: self.target_id.clone(),
            items: self.items.iter().filter(|it| tags.contains(&it.tag)).cloned().collect(),
        }
    }

    /// Drop repeated token sequences, keeping the first occurrence.
    pub fn deduplicated(&self) -> ParaphraseSet {
        let mut seen = BTreeSet::new();
        ParaphraseSet {
            target_id: self.target_id.clone(),
            items: self.items.iter().filter(|it| seen.insert(it.tokens.clone())).cloned().collect(),
        }
    }
}

/// Fuzzy span-overlap score: for every item, the best `scorer` value over
/// all windows with the span's token length (0 if the item is shorter),
/// averaged over items.
pub fn fuzzy_span_score(w: &Sentence, span: Span, s: &ParaphraseSet, scorer: &MatchScorer) -> Result<f64> {
    check_span(w, span)?;
    if s.is_empty() {
        return Err(Error::EmptyParaphraseSet);
    }
    let needle = w.norm_slice(span);
    let total: f64 = s.items.iter().map(|item| best_window(needle, &item.tokens, scorer)).sum();
    Ok(total / s.size() as f64)
}

fn best_window(needle: &[String], hay: &[String], scorer: &MatchScorer) -> f64 {
    if hay.len() < needle.len() {
        return 0.0;
    }
    let mut best = 0.0_f64;
    for window in hay.windows(needle.len()) {
        best = best.max(scorer.score(needle, window));
        if best >= 1.0 {
            break;
        }
    }
    best
}

pub(crate) fn check_span(w: &Sentence, span: Span) -> Result<()> {
    Span::new(span.i, span.j, w.len()).map(|_| ())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ChartOptions {
    /// Return an all-zero chart instead of failing on an empty set.
    pub empty_fallback: bool,
    /// Collapse duplicate paraphrases before scoring.
    pub dedup: bool,
}

/// Score every span of `w` against `s`.
pub fn score_chart(w: &Sentence, s: &ParaphraseSet, scorer: &MatchScorer, opts: ChartOptions) -> Result<ScoreChart> {
    let deduped;
    let s = if opts.dedup {
        deduped = s.deduplicated();
        &deduped
    } else {
        s
    };
    if s.is_empty() {
        return if opts.empty_fallback { ScoreChart::zeros(w.len()) } else { Err(Error::EmptyParaphraseSet) };
    }
    match scorer {
        MatchScorer::Exact => {
            let index = WindowIndex::build(s, w.norm_tokens.len());
            let size = s.size() as f64;
            ScoreChart::from_fn(w.len(), |span| index.count(w.norm_slice(span)) as f64 / size)
        }
        _ => ScoreChart::fallible_from_fn(w.len(), |span| fuzzy_span_score(w, span, s, scorer)),
    }
}
