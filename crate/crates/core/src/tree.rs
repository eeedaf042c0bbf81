//! Constituency trees.
//!
//! Gold trees may be n-ary and carry preterminal tags; predicted trees are
//! binary with bare leaves. Leaf positions are 1-based and contiguous.

use std::collections::BTreeSet;
use std::fmt;

use crate::span::Span;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabeledTree {
    Leaf { token: String, position: usize },
    Node { label: String, children: Vec<LabeledTree> },
}

/// A span together with the label of the node that produced it. Leaves carry
/// an empty label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledSpan {
    pub span: Span,
    pub label: String,
}

impl LabeledTree {
    pub fn leaf(token: impl Into<String>, position: usize) -> Self {
        LabeledTree::Leaf { token: token.into(), position }
    }

    pub fn node(label: impl Into<String>, children: Vec<LabeledTree>) -> Self {
        LabeledTree::Node { label: label.into(), children }
    }

    pub fn label(&self) -> &str {
        match self {
            LabeledTree::Leaf { .. } => "",
            LabeledTree::Node { label, .. } => label,
        }
    }

    pub fn children(&self) -> &[LabeledTree] {
        match self {
            LabeledTree::Leaf { .. } => &[],
            LabeledTree::Node { children, .. } => children,
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, LabeledTree::Leaf { .. })
    }

    /// A node whose only child is a leaf, e.g. `(DT the)`.
    pub fn is_preterminal(&self) -> bool {
        matches!(self, LabeledTree::Node { children, .. } if children.len() == 1 && children[0].is_leaf())
    }

    /// Leaf tokens, left to right.
    pub fn tokens(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_tokens(&mut out);
        out
    }

    fn collect_tokens<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            LabeledTree::Leaf { token, .. } => out.push(token),
            LabeledTree::Node { children, .. } => children.iter().for_each(|c| c.collect_tokens(out)),
        }
    }

    /// Number of leaves.
    pub fn len(&self) -> usize {
        match self {
            LabeledTree::Leaf { .. } => 1,
            LabeledTree::Node { children, .. } => children.iter().map(LabeledTree::len).sum(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The span covered by this node, from its first and last leaf positions.
    pub fn span(&self) -> Option<Span> {
        Some(Span::of(self.first_position()?, self.last_position()?))
    }

    fn first_position(&self) -> Option<usize> {
        match self {
            LabeledTree::Leaf { position, .. } => Some(*position),
            LabeledTree::Node { children, .. } => children.first()?.first_position(),
        }
    }

    fn last_position(&self) -> Option<usize> {
        match self {
            LabeledTree::Leaf { position, .. } => Some(*position),
            LabeledTree::Node { children, .. } => children.last()?.last_position(),
        }
    }

    /// Reassign leaf positions to 1..n, left to right.
    pub fn renumber(&mut self) {
        fn go(t: &mut LabeledTree, next: &mut usize) {
            match t {
                LabeledTree::Leaf { position, .. } => {
                    *position = *next;
                    *next += 1;
                }
                LabeledTree::Node { children, .. } => children.iter_mut().for_each(|c| go(c, next)),
            }
        }
        let mut next = 1;
        go(self, &mut next);
    }

    /// Check the structural invariants: no childless nodes, leaf positions
    /// `1..n` without gaps.
    pub fn validate(&self) -> Result<()> {
        fn go(t: &LabeledTree, next: &mut usize) -> Result<()> {
            match t {
                LabeledTree::Leaf { position, token } => {
                    if *position != *next {
                        return Err(Error::InvalidTree(format!(
                            "leaf `{token}` has position {position}, expected {next}"
                        )));
                    }
                    *next += 1;
                    Ok(())
                }
                LabeledTree::Node { label, children } => {
                    if children.is_empty() {
                        return Err(Error::InvalidTree(format!("node `{label}` has no children")));
                    }
                    children.iter().try_for_each(|c| go(c, next))
                }
            }
        }
        let mut next = 1;
        go(self, &mut next)
    }

    /// Every node's span with its label, leaves and root included, in
    /// pre-order. Unary chains produce repeated spans.
    pub fn node_spans(&self) -> Vec<LabeledSpan> {
        fn go(t: &LabeledTree, out: &mut Vec<LabeledSpan>) {
            if let Some(span) = t.span() {
                out.push(LabeledSpan { span, label: t.label().to_string() });
            }
            t.children().iter().for_each(|c| go(c, out));
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Set of labeled spans of every node; duplicates from unary chains with
    /// the same label collapse.
    pub fn tree_to_spans(&self) -> BTreeSet<LabeledSpan> {
        self.node_spans().into_iter().collect()
    }

    /// Unlabeled span set.
    pub fn spans(&self) -> BTreeSet<Span> {
        self.node_spans().into_iter().map(|s| s.span).collect()
    }

    /// Rewrite every node label in place.
    pub fn map_labels(&mut self, f: &impl Fn(&str) -> String) {
        if let LabeledTree::Node { label, children } = self {
            *label = f(label);
            children.iter_mut().for_each(|c| c.map_labels(f));
        }
    }

    /// Every internal node has exactly two children, counting leaves directly.
    pub fn is_binary(&self) -> bool {
        match self {
            LabeledTree::Leaf { .. } => true,
            LabeledTree::Node { children, .. } => {
                children.len() == 2 && children.iter().all(LabeledTree::is_binary)
            }
        }
    }
}

impl fmt::Display for LabeledTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::treebank::serialize_bracketed(self))
    }
}
