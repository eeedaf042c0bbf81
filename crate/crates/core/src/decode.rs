//! Maximum-score binary tree decoding over a span chart.
//!
//! The objective is the sum of chart scores over internal spans of width at
//! least 2, root included. Width-1 spans are in every binary tree and
//! contribute nothing. Ties are broken towards the widest left child in every
//! cell, so an all-zero chart decodes to the fully left-branching tree.

use crate::chart::ScoreChart;
use crate::span::Span;
use crate::tree::LabeledTree;
use crate::{Error, Result};

/// Label written on internal nodes of predicted trees.
pub const PREDICTED_LABEL: &str = "X";

/// Largest sentence the exhaustive oracle accepts.
pub const EXHAUSTIVE_MAX_LEN: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Binary tree with `X` internal nodes and leaves `1..n` named by position.
    pub tree: LabeledTree,
    pub total_score: f64,
    /// `(span, split)` for every internal node in pre-order; the left child
    /// covers `span.i..=split`.
    pub trace: Vec<(Span, usize)>,
}

impl DecodeResult {
    /// Internal spans of width >= 2.
    pub fn internal_spans(&self) -> Vec<Span> {
        self.trace.iter().map(|(s, _)| *s).collect()
    }

    /// The predicted tree with leaves replaced by `tokens`.
    pub fn tree_with_tokens(&self, tokens: &[String]) -> LabeledTree {
        fn go(t: &LabeledTree, tokens: &[String]) -> LabeledTree {
            match t {
                LabeledTree::Leaf { position, .. } => LabeledTree::leaf(tokens[*position - 1].clone(), *position),
                LabeledTree::Node { label, children } => {
                    LabeledTree::node(label.clone(), children.iter().map(|c| go(c, tokens)).collect())
                }
            }
        }
        go(&self.tree, tokens)
    }
}

fn build(span: Span, split: &dyn Fn(Span) -> usize, trace: &mut Vec<(Span, usize)>) -> LabeledTree {
    if span.i == span.j {
        return LabeledTree::leaf(span.i.to_string(), span.i);
    }
    let k = split(span);
    trace.push((span, k));
    let left = build(Span::of(span.i, k), split, trace);
    let right = build(Span::of(k + 1, span.j), split, trace);
    LabeledTree::node(PREDICTED_LABEL, vec![left, right])
}

/// CKY-style Viterbi decoding in O(n^3) time and O(n^2) space.
pub fn viterbi_parse(chart: &ScoreChart) -> Result<DecodeResult> {
    let n = chart.n();
    if n == 0 {
        return Err(Error::EmptySentence);
    }
    // best[i][j] and split[i][j], 1-based.
    let mut best = vec![vec![0.0_f64; n + 1]; n + 1];
    let mut split = vec![vec![0_usize; n + 1]; n + 1];
    for width in 2..=n {
        for i in 1..=n + 1 - width {
            let j = i + width - 1;
            let mut arg = j - 1;
            let mut max = f64::NEG_INFINITY;
            for k in (i..j).rev() {
                let v = best[i][k] + best[k + 1][j];
                if v > max {
                    max = v;
                    arg = k;
                }
            }
            best[i][j] = chart.get(Span::of(i, j)) + max;
            split[i][j] = arg;
        }
    }
    let mut trace = Vec::with_capacity(n.saturating_sub(1));
    let tree = build(Span::of(1, n), &|s: Span| split[s.i][s.j], &mut trace);
    Ok(DecodeResult { tree, total_score: best[1][n], trace })
}

/// Binary tree shape used by the exhaustive search; `Split(k, l, r)` splits
/// after position `k`.
#[derive(Debug, Clone)]
enum Shape {
    Leaf,
    Split(usize, Box<Shape>, Box<Shape>),
}

fn all_shapes(i: usize, j: usize) -> Vec<Shape> {
    if i == j {
        return vec![Shape::Leaf];
    }
    let mut out = Vec::new();
    for k in i..j {
        let lefts = all_shapes(i, k);
        let rights = all_shapes(k + 1, j);
        for l in &lefts {
            for r in &rights {
                out.push(Shape::Split(k, Box::new(l.clone()), Box::new(r.clone())));
            }
        }
    }
    out
}

/// Total in the same association order as the Viterbi recurrence, so equal
/// trees get bit-identical totals.
fn shape_score(shape: &Shape, span: Span, chart: &ScoreChart) -> f64 {
    match shape {
        Shape::Leaf => 0.0,
        Shape::Split(k, l, r) => {
            let left = shape_score(l, Span::of(span.i, *k), chart);
            let right = shape_score(r, Span::of(k + 1, span.j), chart);
            chart.get(span) + (left + right)
        }
    }
}

/// Pre-order split points; the lexicographically largest sequence among
/// optimal trees is the one Viterbi's tie-break selects.
fn preorder(shape: &Shape, out: &mut Vec<usize>) {
    if let Shape::Split(k, l, r) = shape {
        out.push(*k);
        preorder(l, out);
        preorder(r, out);
    }
}

/// Number of binary trees over `n` leaves, Catalan(n - 1).
pub fn count_binary_trees(n: usize) -> usize {
    if n == 0 {
        return 0;
    }
    let m = n - 1;
    let mut c: u128 = 1;
    for k in 0..m as u128 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c as usize
}

/// Enumerate every binary tree and return a maximum, breaking ties like
/// [`viterbi_parse`]. Test oracle; limited to `n <= 12`.
pub fn exhaustive_parse(chart: &ScoreChart) -> Result<DecodeResult> {
    let n = chart.n();
    if n == 0 {
        return Err(Error::EmptySentence);
    }
    if n > EXHAUSTIVE_MAX_LEN {
        return Err(Error::TooLong { n, max: EXHAUSTIVE_MAX_LEN });
    }
    let root = Span::of(1, n);
    let mut best: Option<(f64, Vec<usize>, Shape)> = None;
    for shape in all_shapes(1, n) {
        let score = shape_score(&shape, root, chart);
        let mut key = Vec::new();
        preorder(&shape, &mut key);
        let better = match &best {
            None => true,
            Some((s, k, _)) => score > *s || (score == *s && key > *k),
        };
        if better {
            best = Some((score, key, shape));
        }
    }
    let (total_score, _, shape) = best.expect("at least one tree");

    let mut splits = std::collections::HashMap::new();
    fn record(shape: &Shape, span: Span, out: &mut std::collections::HashMap<Span, usize>) {
        if let Shape::Split(k, l, r) = shape {
            out.insert(span, *k);
            record(l, Span::of(span.i, *k), out);
            record(r, Span::of(k + 1, span.j), out);
        }
    }
    record(&shape, root, &mut splits);
    let mut trace = Vec::new();
    let tree = build(root, &|s: Span| splits[&s], &mut trace);
    Ok(DecodeResult { tree, total_score, trace })
}
