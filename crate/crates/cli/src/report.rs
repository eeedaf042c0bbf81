//! Output files: CSV tables, JSON summaries, bracketed trees, chart dumps.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use spanoverlap::pipeline::ParsedSentence;
use spanoverlap::treebank::serialize_bracketed;
use spanoverlap::LabeledTree;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn write_lines(path: &Path, lines: impl Iterator<Item = Result<String>>) -> Result<()> {
    let file = File::create(path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{}", line?)?;
    }
    w.flush()?;
    Ok(())
}

/// Bracketed line for a predicted tree; a one-word sentence is wrapped so
/// every line is a bracketed tree.
pub fn tree_line(tree: &LabeledTree) -> String {
    if tree.is_leaf() {
        return serialize_bracketed(&LabeledTree::node(spanoverlap::decode::PREDICTED_LABEL, vec![tree.clone()]));
    }
    serialize_bracketed(tree)
}

pub fn write_predictions(path: &Path, parsed: &[ParsedSentence]) -> Result<()> {
    write_lines(path, parsed.iter().map(|p| Ok(tree_line(&p.tree))))
}

pub fn write_charts(path: &Path, parsed: &[ParsedSentence]) -> Result<()> {
    write_lines(path, parsed.iter().map(|p| Ok(serde_json::to_string(&p.chart.to_record(&p.sid))?)))
}
