use std::collections::BTreeSet;

use regex::Regex;

use crate::tree::LabeledTree;
use crate::{Error, Result};

/// Preterminal tags treated as punctuation by default: the PTB set plus the
/// CTB (`PU`), French (`PONCT`) and German (`$.`, `$,`, `$(`) equivalents.
pub const DEFAULT_PUNCT_TAGS: &[&str] = &[
    ".", ",", ":", "``", "''", "-LRB-", "-RRB-", "#", "$", "PU", "PONCT", "$.", "$,", "$(",
];

const EMPTY_ELEMENT_TAG: &str = "-NONE-";

/// How punctuation leaves are recognised.
#[derive(Debug, Clone)]
pub struct PunctSpec {
    /// Preterminal tags whose leaf is removed.
    pub tags: BTreeSet<String>,
    /// Leaves whose whole token matches are removed regardless of tag.
    pub token_pattern: Option<Regex>,
    /// Also remove `-NONE-` empty elements and traces.
    pub drop_empty_elements: bool,
}

impl Default for PunctSpec {
    fn default() -> Self {
        PunctSpec {
            tags: DEFAULT_PUNCT_TAGS.iter().map(|s| s.to_string()).collect(),
            token_pattern: None,
            drop_empty_elements: true,
        }
    }
}

impl PunctSpec {
    /// Tag set from a whitespace-separated list (`,` is itself a tag).
    pub fn with_tags(mut self, list: &str) -> Self {
        self.tags = list.split_whitespace().map(String::from).collect();
        self
    }

    /// Fallback for corpora without reliable tags: tokens made only of
    /// Unicode punctuation.
    pub fn with_token_fallback(mut self) -> Self {
        self.token_pattern = Some(Regex::new(r"^\p{P}+$").expect("static regex"));
        self
    }

    fn is_punct_tag(&self, tag: &str) -> bool {
        self.tags.contains(tag) || (self.drop_empty_elements && tag == EMPTY_ELEMENT_TAG)
    }

    fn is_punct_token(&self, token: &str) -> bool {
        self.token_pattern.as_ref().is_some_and(|re| re.is_match(token))
    }
}

/// Result of [`strip_punctuation`].
#[derive(Debug, Clone, PartialEq)]
pub struct Stripped {
    pub tree: LabeledTree,
    /// `position_map[k]` is the new 1-based position of old leaf `k + 1`,
    /// or `None` if that leaf was removed.
    pub position_map: Vec<Option<usize>>,
}

/// Remove punctuation leaves, delete nodes left empty, and renumber the
/// remaining leaves. A tree made only of punctuation yields
/// [`Error::EmptySentence`].
pub fn strip_punctuation(tree: &LabeledTree, spec: &PunctSpec) -> Result<Stripped> {
    let mut position_map = Vec::with_capacity(tree.len());
    let mut next = 1;
    let stripped = prune(tree, None, spec, &mut position_map, &mut next).ok_or(Error::EmptySentence)?;
    Ok(Stripped { tree: stripped, position_map })
}

fn prune(
    t: &LabeledTree,
    parent_tag: Option<&str>,
    spec: &PunctSpec,
    map: &mut Vec<Option<usize>>,
    next: &mut usize,
) -> Option<LabeledTree> {
    match t {
        LabeledTree::Leaf { token, .. } => {
            let drop = parent_tag.is_some_and(|tag| spec.is_punct_tag(tag)) || spec.is_punct_token(token);
            if drop {
                map.push(None);
                None
            } else {
                map.push(Some(*next));
                *next += 1;
                Some(LabeledTree::leaf(token.clone(), *next - 1))
            }
        }
        LabeledTree::Node { label, children } => {
            let tag = t.is_preterminal().then_some(label.as_str());
            let kept: Vec<_> = children.iter().filter_map(|c| prune(c, tag, spec, map, next)).collect();
            (!kept.is_empty()).then(|| LabeledTree::node(label.clone(), kept))
        }
    }
}
