use std::path::Path;

use log::warn;

use super::bracketed::{parse_bracketed_with, ParseMode};
use super::labels::strip_function_tags;
use crate::sentence::Sentence;
use crate::tree::LabeledTree;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct LoadOptions {
    /// Trees may span several lines; a tree ends when its brackets balance.
    pub multiline: bool,
    /// Skip malformed trees with a warning instead of failing.
    pub lenient: bool,
    pub strip_function_tags: bool,
    pub language: String,
    pub split: String,
}

impl Default for LoadOptions {
    fn default() -> Self {
        LoadOptions {
            multiline: false,
            lenient: false,
            strip_function_tags: true,
            language: "en".into(),
            split: "dev".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub sentence: Sentence,
    pub tree: LabeledTree,
}

/// Gold trees in file order. Sentence ids are the 1-based ordinal of the tree
/// in its file, so they stay stable when malformed trees are skipped.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub language: String,
    pub split: String,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sid: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.sentence.id == sid)
    }
}

/// Group input lines into (first line number, tree text) chunks.
fn chunks(text: &str, multiline: bool) -> Vec<(usize, String)> {
    let mut out = Vec::new();
    if !multiline {
        for (k, line) in text.lines().enumerate() {
            if !line.trim().is_empty() {
                out.push((k + 1, line.to_string()));
            }
        }
        return out;
    }
    let mut current = String::new();
    let mut start = 0;
    let mut depth: i64 = 0;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            if !current.is_empty() && depth <= 0 {
                out.push((start, std::mem::take(&mut current)));
            }
            continue;
        }
        if current.is_empty() {
            start = k + 1;
            depth = 0;
        }
        current.push_str(line);
        current.push('\n');
        depth += line.chars().map(|c| match c {
            '(' => 1,
            ')' => -1,
            _ => 0,
        }).sum::<i64>();
        if depth <= 0 {
            out.push((start, std::mem::take(&mut current)));
        }
    }
    if !current.is_empty() {
        out.push((start, current));
    }
    out
}

/// Parse treebank text already in memory. `origin` is used in messages.
pub fn parse_corpus_text(text: &str, origin: &Path, opts: &LoadOptions) -> Result<(Corpus, Vec<LoadWarning>)> {
    let mut entries = Vec::new();
    let mut warnings = Vec::new();
    for (ordinal, (line, chunk)) in chunks(text, opts.multiline).into_iter().enumerate() {
        let sid = (ordinal + 1).to_string();
        match parse_bracketed_with(&chunk, ParseMode::Strict) {
            Ok(mut tree) => {
                if opts.strip_function_tags {
                    tree.map_labels(&|l| strip_function_tags(l).to_string());
                }
                let tokens: Vec<String> = tree.tokens().into_iter().map(String::from).collect();
                let sentence = Sentence::identity(sid, tokens)?;
                entries.push(CorpusEntry { sentence, tree });
            }
            Err(e) if opts.lenient => {
                warn!("{}:{line}: skipping malformed tree: {e}", origin.display());
                warnings.push(LoadWarning { line, message: e.to_string() });
            }
            Err(e) => {
                return Err(Error::Corpus { path: origin.to_path_buf(), message: format!("line {line}: {e}") });
            }
        }
    }
    if entries.is_empty() {
        return Err(Error::Corpus { path: origin.to_path_buf(), message: "no trees parsed".into() });
    }
    let corpus = Corpus { language: opts.language.clone(), split: opts.split.clone(), entries };
    Ok((corpus, warnings))
}

pub fn load_corpus(path: &Path, opts: &LoadOptions) -> Result<(Corpus, Vec<LoadWarning>)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Corpus { path: path.to_path_buf(), message: e.to_string() })?;
    parse_corpus_text(&text, path, opts)
}
