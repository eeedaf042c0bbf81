//! Spans over a sentence, 1-based and inclusive on both ends.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// The word sequence `w[i..=j]`, with `1 <= i <= j <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub i: usize,
    pub j: usize,
}

impl Span {
    /// Checked constructor for a span inside a sentence of length `n`.
    pub fn new(i: usize, j: usize, n: usize) -> Result<Self> {
        if i == 0 || i > j || j > n {
            return Err(Error::InvalidSpan { i, j, n });
        }
        Ok(Span { i, j })
    }

    /// Unchecked constructor; callers guarantee `1 <= i <= j`.
    pub const fn of(i: usize, j: usize) -> Self {
        Span { i, j }
    }

    pub fn width(self) -> usize {
        self.j - self.i + 1
    }

    pub fn contains(self, other: Span) -> bool {
        self.i <= other.i && other.j <= self.j
    }

    pub fn intersects(self, other: Span) -> bool {
        self.i <= other.j && other.i <= self.j
    }

    /// Width-1 spans and the whole-sentence span.
    pub fn is_trivial(self, n: usize) -> bool {
        self.width() == 1 || (self.i == 1 && self.j == n)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// True iff the spans intersect and neither contains the other, i.e. they can
/// not both be constituents of one tree.
pub fn is_partial_overlap(a: Span, b: Span) -> bool {
    a.intersects(b) && !a.contains(b) && !b.contains(a)
}

/// All `n(n+1)/2` spans, ordered by start then end.
pub fn enumerate_spans(n: usize) -> Result<Vec<Span>> {
    if n == 0 {
        return Err(Error::EmptySentence);
    }
    Ok((1..=n)
        .flat_map(|i| (i..=n).map(move |j| Span { i, j }))
        .collect())
}
