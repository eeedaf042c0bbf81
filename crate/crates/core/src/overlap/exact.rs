use std::collections::HashMap;

use super::{check_span, ParaphraseSet};
use crate::sentence::Sentence;
use crate::span::Span;
use crate::{Error, Result};

/// For every item of a paraphrase set, the distinct windows of up to
/// `max_len` tokens, so a span's containment count is one hash lookup.
#[derive(Debug)]
pub struct WindowIndex<'a> {
    counts: HashMap<&'a [String], usize>,
}

impl<'a> WindowIndex<'a> {
    pub fn build(s: &'a ParaphraseSet, max_len: usize) -> Self {
        let mut counts: HashMap<&'a [String], usize> = HashMap::new();
        let mut seen: std::collections::HashSet<&'a [String]> = std::collections::HashSet::new();
        for item in &s.items {
            seen.clear();
            let toks = item.tokens.as_slice();
            for len in 1..=max_len.min(toks.len()) {
                for window in toks.windows(len) {
                    if seen.insert(window) {
                        *counts.entry(window).or_insert(0) += 1;
                    }
                }
            }
        }
        WindowIndex { counts }
    }

    /// Number of items containing `needle` contiguously.
    pub fn count(&self, needle: &[String]) -> usize {
        self.counts.get(needle).copied().unwrap_or(0)
    }
}

/// Number of items of `s` that contain the normalized span as a contiguous
/// token subsequence; each item counts at most once.
pub fn span_hit_count(w: &Sentence, span: Span, s: &ParaphraseSet) -> Result<usize> {
    check_span(w, span)?;
    let needle = w.norm_slice(span);
    Ok(s.items
        .iter()
        .filter(|it| it.tokens.len() >= needle.len() && it.tokens.windows(needle.len()).any(|win| win == needle))
        .count())
}

/// `span_hit_count / |s|`.
pub fn exact_span_score(w: &Sentence, span: Span, s: &ParaphraseSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyParaphraseSet);
    }
    Ok(span_hit_count(w, span, s)? as f64 / s.size() as f64)
}
