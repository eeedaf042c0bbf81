use crate::tree::LabeledTree;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    #[default]
    Strict,
    /// Keep the longest prefix that ends in a completed node and close any
    /// brackets still open. Leading text before the first `(` is skipped.
    Recover,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Atom(String),
}

fn lex(text: &str) -> Vec<(usize, Tok)> {
    let mut out = Vec::new();
    let mut atom_start: Option<usize> = None;
    let flush = |start: &mut Option<usize>, end: usize, out: &mut Vec<(usize, Tok)>| {
        if let Some(s) = start.take() {
            out.push((s, Tok::Atom(text[s..end].to_string())));
        }
    };
    for (off, ch) in text.char_indices() {
        match ch {
            '(' | ')' => {
                flush(&mut atom_start, off, &mut out);
                out.push((off, if ch == '(' { Tok::Open } else { Tok::Close }));
            }
            c if c.is_whitespace() => flush(&mut atom_start, off, &mut out),
            _ => {
                atom_start.get_or_insert(off);
            }
        }
    }
    flush(&mut atom_start, text.len(), &mut out);
    out
}

fn unescape(token: &str) -> String {
    match token {
        "-LRB-" => "(".to_string(),
        "-RRB-" => ")".to_string(),
        _ => token.to_string(),
    }
}

fn escape(token: &str) -> &str {
    match token {
        "(" => "-LRB-",
        ")" => "-RRB-",
        _ => token,
    }
}

struct Frame {
    label: Option<String>,
    children: Vec<LabeledTree>,
}

impl Frame {
    fn finish(self) -> Option<LabeledTree> {
        if self.children.is_empty() {
            None
        } else {
            Some(LabeledTree::node(self.label.unwrap_or_default(), self.children))
        }
    }
}

enum Outcome {
    Done(LabeledTree),
    /// Failed at `offset`; `good` is the token count of the longest prefix
    /// ending in a completed node.
    Failed { offset: usize, message: String, good: usize },
}

fn run(tokens: &[(usize, Tok)], text_len: usize) -> Outcome {
    let mut stack: Vec<Frame> = Vec::new();
    let mut root: Option<LabeledTree> = None;
    let mut good = 0;
    let fail = |offset: usize, message: &str, good: usize| Outcome::Failed { offset, message: message.to_string(), good };

    for (k, (offset, tok)) in tokens.iter().enumerate() {
        if root.is_some() {
            return fail(*offset, "trailing input after complete tree", good);
        }
        match tok {
            Tok::Open => stack.push(Frame { label: None, children: Vec::new() }),
            Tok::Atom(a) => match stack.last_mut() {
                None => return fail(*offset, "leaf outside any bracket", good),
                Some(f) if f.label.is_none() && f.children.is_empty() => f.label = Some(a.clone()),
                Some(f) => f.children.push(LabeledTree::leaf(unescape(a), 0)),
            },
            Tok::Close => {
                let Some(frame) = stack.pop() else {
                    return fail(*offset, "unbalanced `)`", good);
                };
                let Some(node) = frame.finish() else {
                    return fail(*offset, "empty node", good);
                };
                good = k + 1;
                match stack.last_mut() {
                    Some(parent) => {
                        if parent.label.is_none() && parent.children.is_empty() {
                            parent.label = Some(String::new());
                        }
                        parent.children.push(node);
                    }
                    None => root = Some(node),
                }
            }
        }
    }
    match root {
        Some(t) => Outcome::Done(t),
        None => {
            let offset = tokens.last().map(|(o, _)| *o).unwrap_or(text_len);
            let message = if tokens.is_empty() { "empty input" } else { "unbalanced `(`" };
            fail(offset, message, good)
        }
    }
}

/// Close every bracket still open after `tokens`, dropping nodes that have no
/// content.
fn auto_close(tokens: &[(usize, Tok)]) -> Option<LabeledTree> {
    let mut stack: Vec<Frame> = Vec::new();
    for (_, tok) in tokens {
        match tok {
            Tok::Open => stack.push(Frame { label: None, children: Vec::new() }),
            Tok::Atom(a) => {
                let f = stack.last_mut()?;
                if f.label.is_none() && f.children.is_empty() {
                    f.label = Some(a.clone());
                } else {
                    f.children.push(LabeledTree::leaf(unescape(a), 0));
                }
            }
            Tok::Close => {
                let node = stack.pop()?.finish()?;
                match stack.last_mut() {
                    Some(p) => {
                        if p.label.is_none() && p.children.is_empty() {
                            p.label = Some(String::new());
                        }
                        p.children.push(node);
                    }
                    None => return Some(node),
                }
            }
        }
    }
    let mut carry: Option<LabeledTree> = None;
    while let Some(mut frame) = stack.pop() {
        if let Some(node) = carry.take() {
            frame.children.push(node);
        }
        carry = frame.finish();
    }
    carry
}

/// Drop the `( (S ...) )` wrapper used by PTB files.
fn unwrap_root(tree: LabeledTree) -> LabeledTree {
    match tree {
        LabeledTree::Node { label, mut children }
            if label.is_empty() && children.len() == 1 && !children[0].is_leaf() =>
        {
            children.pop().unwrap()
        }
        t => t,
    }
}

/// Parse one bracketed tree in strict mode.
pub fn parse_bracketed(text: &str) -> Result<LabeledTree> {
    parse_bracketed_with(text, ParseMode::Strict)
}

pub fn parse_bracketed_with(text: &str, mode: ParseMode) -> Result<LabeledTree> {
    let mut tokens = lex(text);
    if mode == ParseMode::Recover {
        let first_open = tokens.iter().position(|(_, t)| *t == Tok::Open).unwrap_or(tokens.len());
        tokens.drain(..first_open);
    }
    let tree = match run(&tokens, text.len()) {
        Outcome::Done(t) => t,
        Outcome::Failed { offset, message, good } => match mode {
            ParseMode::Strict => return Err(Error::Parse { offset, message }),
            ParseMode::Recover => auto_close(&tokens[..good]).ok_or(Error::Parse { offset, message })?,
        },
    };
    let mut tree = unwrap_root(tree);
    tree.renumber();
    Ok(tree)
}

/// Render a tree as a single-line bracketed string. Literal parentheses in
/// leaves are written as `-LRB-`/`-RRB-`.
pub fn serialize_bracketed(tree: &LabeledTree) -> String {
    let mut out = String::new();
    write_tree(tree, &mut out);
    out
}

fn write_tree(tree: &LabeledTree, out: &mut String) {
    match tree {
        LabeledTree::Leaf { token, .. } => out.push_str(escape(token)),
        LabeledTree::Node { label, children } => {
            out.push('(');
            out.push_str(label);
            for (k, c) in children.iter().enumerate() {
                if k > 0 || !label.is_empty() {
                    out.push(' ');
                }
                write_tree(c, out);
            }
            out.push(')');
        }
    }
}
