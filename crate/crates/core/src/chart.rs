use serde::{Deserialize, Serialize};

use crate::span::{enumerate_spans, Span};
use crate::{Error, Result};

/// One score in `[0, 1]` for every span of a sentence of length `n`.
///
/// Entries are stored row-major in the order of [`enumerate_spans`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreChart {
    n: usize,
    entries: Vec<f64>,
}

#[inline]
fn index(n: usize, span: Span) -> usize {
    let r = span.i - 1;
    r * (n + 1) - r * (r + 1) / 2 + (span.j - span.i)
}

impl ScoreChart {
    pub fn from_fn(n: usize, mut score: impl FnMut(Span) -> f64) -> Result<Self> {
        let spans = enumerate_spans(n)?;
        let mut entries = Vec::with_capacity(spans.len());
        for span in spans {
            let value = score(span);
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::ScoreOutOfRange { i: span.i, j: span.j, value });
            }
            entries.push(value);
        }
        Ok(ScoreChart { n, entries })
    }

    pub fn fallible_from_fn(n: usize, mut score: impl FnMut(Span) -> Result<f64>) -> Result<Self> {
        let mut err = None;
        let chart = ScoreChart::from_fn(n, |span| match score(span) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok(chart),
        }
    }

    pub fn zeros(n: usize) -> Result<Self> {
        ScoreChart::from_fn(n, |_| 0.0)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Panics if `span` is outside the chart.
    pub fn get(&self, span: Span) -> f64 {
        assert!(span.i >= 1 && span.i <= span.j && span.j <= self.n, "span {span} outside chart of length {}", self.n);
        self.entries[index(self.n, span)]
    }

    pub fn iter(&self) -> impl Iterator<Item = (Span, f64)> + '_ {
        enumerate_spans(self.n).unwrap_or_default().into_iter().zip(self.entries.iter().copied())
    }

    pub fn to_record(&self, sid: &str) -> ChartRecord {
        ChartRecord {
            sid: sid.to_string(),
            n: self.n,
            scores: self.iter().map(|(s, v)| (s.i, s.j, v)).collect(),
        }
    }
}

/// One line of the chart dump: `{"sid":..,"n":..,"scores":[[i,j,score],..]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub sid: String,
    pub n: usize,
    pub scores: Vec<(usize, usize, f64)>,
}

impl ChartRecord {
    /// Rebuild the chart, requiring exactly one entry per legal span.
    pub fn to_chart(&self) -> Result<ScoreChart> {
        let n = self.n;
        let mut slots: Vec<Option<f64>> = vec![None; n * (n + 1) / 2];
        for &(i, j, v) in &self.scores {
            let span = Span::new(i, j, n)?;
            let slot = &mut slots[index(n, span)];
            if slot.replace(v).is_some() {
                return Err(Error::Config(format!("chart {}: duplicate entry for {span}", self.sid)));
            }
        }
        ScoreChart::fallible_from_fn(n, |span| {
            slots[index(n, span)]
                .ok_or_else(|| Error::Config(format!("chart {}: missing entry for {span}", self.sid)))
        })
    }
}
