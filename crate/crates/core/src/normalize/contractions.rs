use std::path::Path;

use crate::{Error, Result};

const EN: &str = include_str!("../../data/contractions/en.tsv");
const FR: &str = include_str!("../../data/contractions/fr.tsv");

#[derive(Debug, Clone, PartialEq, Eq)]
enum Rule {
    Exact { word: String, parts: Vec<String> },
    /// `prefix*suffix`; `*` in `parts` is replaced by the matched remainder.
    Wildcard { prefix: String, suffix: String, parts: Vec<String> },
}

/// Contraction rules for one language, read from a
/// `contraction<TAB>part1 part2` file. Exact entries are tried before
/// wildcard rules; among wildcards the first match in file order wins.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ContractionTable {
    rules: Vec<Rule>,
}

impl ContractionTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut exact = Vec::new();
        let mut wild = Vec::new();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (lhs, rhs) = line
                .split_once('\t')
                .ok_or_else(|| Error::Config(format!("contraction table line {}: missing tab", k + 1)))?;
            let lhs = lhs.trim().to_lowercase();
            let parts: Vec<String> = rhs.split_whitespace().map(String::from).collect();
            if lhs.is_empty() || parts.is_empty() {
                return Err(Error::Config(format!("contraction table line {}: empty field", k + 1)));
            }
            match lhs.matches('*').count() {
                0 => exact.push(Rule::Exact { word: lhs, parts }),
                1 => {
                    let (prefix, suffix) = lhs.split_once('*').unwrap();
                    wild.push(Rule::Wildcard { prefix: prefix.into(), suffix: suffix.into(), parts });
                }
                _ => return Err(Error::Config(format!("contraction table line {}: more than one `*`", k + 1))),
            }
        }
        exact.extend(wild);
        Ok(ContractionTable { rules: exact })
    }

    pub fn load(path: &Path) -> Result<Self> {
        ContractionTable::parse(&std::fs::read_to_string(path)?)
    }

    /// Built-in table for English and French; empty for other languages.
    pub fn builtin(language: &str) -> Self {
        let text = match language {
            "en" => EN,
            "fr" => FR,
            _ => "",
        };
        ContractionTable::parse(text).expect("built-in contraction tables are well formed")
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// Split one token, or `None` if no rule applies.
    pub fn split(&self, token: &str) -> Option<Vec<String>> {
        let lower = token.to_lowercase();
        // Slicing the original only works when lowercasing kept byte offsets.
        let source = if lower.len() == token.len() { token } else { lower.as_str() };
        for rule in &self.rules {
            match rule {
                Rule::Exact { word, parts } if *word == lower => {
                    let mut parts = parts.clone();
                    if token.chars().next().is_some_and(char::is_uppercase) {
                        parts[0] = capitalize(&parts[0]);
                    }
                    return Some(parts);
                }
                Rule::Wildcard { prefix, suffix, parts }
                    if lower.len() > prefix.len() + suffix.len()
                        && lower.starts_with(prefix.as_str())
                        && lower.ends_with(suffix.as_str()) =>
                {
                    let middle = &source[prefix.len()..source.len() - suffix.len()];
                    return Some(parts.iter().map(|p| p.replace('*', middle)).collect());
                }
                _ => {}
            }
        }
        None
    }
}

fn capitalize(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Expand every contraction in `tokens` with the built-in table for
/// `language`. Non-contractions pass through.
pub fn expand_contractions(tokens: &[String], language: &str) -> Vec<String> {
    expand_with(tokens, &ContractionTable::builtin(language))
}

pub fn expand_with(tokens: &[String], table: &ContractionTable) -> Vec<String> {
    tokens
        .iter()
        .flat_map(|t| table.split(t).unwrap_or_else(|| vec![t.clone()]))
        .collect()
}
