use std::ops::Range;

use crate::span::Span;
use crate::{Error, Result};

/// A target sentence with its surface tokens and the normalized tokens used
/// for matching.
///
/// `alignment[k]` is the range of `norm_tokens` produced by raw token `k`
/// (0-based). Spans always index raw tokens; [`Sentence::norm_slice`] maps a
/// span onto the normalized sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub id: String,
    pub raw_tokens: Vec<String>,
    pub norm_tokens: Vec<String>,
    pub alignment: Vec<Range<usize>>,
}

impl Sentence {
    pub fn new(
        id: impl Into<String>,
        raw_tokens: Vec<String>,
        norm_tokens: Vec<String>,
        alignment: Vec<Range<usize>>,
    ) -> Result<Self> {
        if raw_tokens.is_empty() || norm_tokens.is_empty() {
            return Err(Error::EmptySentence);
        }
        if alignment.len() != raw_tokens.len() {
            return Err(Error::Config(format!(
                "alignment has {} entries for {} raw tokens",
                alignment.len(),
                raw_tokens.len()
            )));
        }
        let mut next = 0;
        for r in &alignment {
            if r.start != next || r.end <= r.start {
                return Err(Error::Config(format!("alignment is not a monotone cover at {r:?}")));
            }
            next = r.end;
        }
        if next != norm_tokens.len() {
            return Err(Error::Config("alignment does not cover every normalized token".into()));
        }
        Ok(Sentence { id: id.into(), raw_tokens, norm_tokens, alignment })
    }

    /// Sentence whose normalized view is its raw tokens.
    pub fn identity(id: impl Into<String>, tokens: Vec<String>) -> Result<Self> {
        let alignment = (0..tokens.len()).map(|k| k..k + 1).collect();
        Sentence::new(id, tokens.clone(), tokens, alignment)
    }

    pub fn len(&self) -> usize {
        self.raw_tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.raw_tokens.is_empty()
    }

    /// The normalized tokens covering raw span `span`.
    pub fn norm_slice(&self, span: Span) -> &[String] {
        let start = self.alignment[span.i - 1].start;
        let end = self.alignment[span.j - 1].end;
        &self.norm_tokens[start..end]
    }
}
