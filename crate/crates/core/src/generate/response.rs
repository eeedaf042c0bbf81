use std::sync::OnceLock;

use regex::Regex;

use crate::normalize::{is_punctuation_token, TokenizerMode};

fn marker() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^(?:\d+[.)]|[-*•])\s+").expect("static regex"))
}

fn strip_quotes(line: &str) -> &str {
    const PAIRS: [(char, char); 4] = [('"', '"'), ('“', '”'), ('\'', '\''), ('«', '»')];
    for (open, close) in PAIRS {
        if let Some(inner) = line.strip_prefix(open).and_then(|l| l.strip_suffix(close)) {
            return inner.trim();
        }
    }
    line
}

fn token_count(line: &str, mode: TokenizerMode) -> usize {
    match mode {
        TokenizerMode::Whitespace => line.split_whitespace().filter(|t| !is_punctuation_token(t)).count(),
        TokenizerMode::Character => line.chars().filter(|c| !c.is_whitespace() && !is_punctuation_token(&c.to_string())).count(),
    }
}

/// Split a model reply into sentences: one per line, enumeration markers
/// (`1.`, `1)`, `-`, `*`) and surrounding quotes removed, lines with fewer
/// than two tokens dropped.
pub fn parse_response(raw: &str) -> Vec<String> {
    parse_response_with(raw, TokenizerMode::Whitespace)
}

/// As [`parse_response`], counting characters instead of words in
/// character mode.
pub fn parse_response_with(raw: &str, mode: TokenizerMode) -> Vec<String> {
    raw.lines()
        .map(str::trim)
        .map(|l| marker().replace(l, "").into_owned())
        .map(|l| strip_quotes(l.trim()).to_string())
        .filter(|l| token_count(l, mode) >= 2)
        .collect()
}
