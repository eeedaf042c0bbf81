//! Token normalization applied identically to target sentences and to
//! generated paraphrases, so that word-sequence matching survives
//! inflection, contraction and capitalization differences.
//!
//! [`Normalizer::normalize_tokens`] runs, per token: edge clean-up
//! (surrounding punctuation, curly apostrophes), contraction expansion,
//! case folding, stemming, and in character mode a split into Unicode
//! scalars. It is idempotent on its own output.

mod contractions;
mod stem;

use std::ops::Range;
use std::path::Path;

pub use contractions::{expand_contractions, expand_with, ContractionTable};
pub use stem::{SnowballLanguage, StemmerKind, TokenStemmer};

use crate::sentence::Sentence;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TokenizerMode {
    #[default]
    Whitespace,
    /// One token per non-punctuation character; used for unsegmented
    /// scripts.
    Character,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizerConfig {
    pub language: String,
    pub stemmer: StemmerKind,
    pub expand_contractions: bool,
    pub case_fold: bool,
    pub tokenizer_mode: TokenizerMode,
}

impl NormalizerConfig {
    /// Per-language defaults: snowball for en/fr/de/hu/sv, contractions for
    /// en/fr, character mode for Chinese, case folding everywhere.
    pub fn for_language(language: &str) -> Self {
        NormalizerConfig {
            language: language.to_string(),
            stemmer: StemmerKind::for_language(language),
            expand_contractions: matches!(language, "en" | "fr"),
            case_fold: true,
            tokenizer_mode: if language == "zh" { TokenizerMode::Character } else { TokenizerMode::Whitespace },
        }
    }

    /// Everything off: tokens pass through unchanged.
    pub fn identity(language: &str) -> Self {
        NormalizerConfig {
            language: language.to_string(),
            stemmer: StemmerKind::Identity,
            expand_contractions: false,
            case_fold: false,
            tokenizer_mode: TokenizerMode::Whitespace,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tokenizer_mode == TokenizerMode::Character && self.expand_contractions {
            return Err(Error::Config("character mode forbids contraction expansion".into()));
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Normalizer> {
        self.build_with_table(ContractionTable::builtin(&self.language))
    }

    pub fn build_with_table_file(&self, path: &Path) -> Result<Normalizer> {
        self.build_with_table(ContractionTable::load(path)?)
    }

    fn build_with_table(&self, table: ContractionTable) -> Result<Normalizer> {
        self.validate()?;
        Ok(Normalizer { config: self.clone(), stemmer: self.stemmer.build(), table })
    }
}

fn is_punct(c: char) -> bool {
    c.is_ascii_punctuation() || matches!(c, '“' | '”' | '‘' | '’' | '«' | '»' | '…' | '—' | '–' | '。' | '，' | '、' | '；' | '：' | '？' | '！' | '「' | '」' | '《' | '》' | '（' | '）')
}

/// Trim surrounding punctuation, keeping apostrophes since they mark
/// contraction pieces such as `n't` or `l'`. Falls back to the input if
/// nothing would remain.
fn clean_edges(token: &str) -> String {
    let t = token.replace(['’', '‘'], "'");
    let trimmed = t.trim_matches(|c: char| c != '\'' && is_punct(c));
    if trimmed.is_empty() {
        t
    } else {
        trimmed.to_string()
    }
}

/// A token made only of punctuation.
pub fn is_punctuation_token(token: &str) -> bool {
    !token.is_empty() && token.chars().all(is_punct)
}

/// A built normalizer: configuration plus stemmer and contraction table.
#[derive(Debug)]
pub struct Normalizer {
    config: NormalizerConfig,
    stemmer: TokenStemmer,
    table: ContractionTable,
}

impl Normalizer {
    pub fn config(&self) -> &NormalizerConfig {
        &self.config
    }

    /// Stem one token; never returns an empty string.
    pub fn stem(&self, token: &str) -> String {
        self.stemmer.stem(token)
    }

    /// Normalize a token sequence, returning the normalized tokens and for
    /// every input token the range of output tokens it produced.
    pub fn normalize_tokens(&self, raw: &[String]) -> Result<(Vec<String>, Vec<Range<usize>>)> {
        if raw.is_empty() {
            return Err(Error::EmptySentence);
        }
        let cfg = &self.config;
        let mut out = Vec::with_capacity(raw.len());
        let mut alignment = Vec::with_capacity(raw.len());
        for token in raw {
            let start = out.len();
            let cleaned = clean_edges(token);
            let pieces = if cfg.expand_contractions {
                self.table.split(&cleaned).unwrap_or_else(|| vec![cleaned])
            } else {
                vec![cleaned]
            };
            for piece in pieces {
                let folded = if cfg.case_fold { piece.to_lowercase() } else { piece };
                let stemmed = self.stem(&folded);
                match cfg.tokenizer_mode {
                    TokenizerMode::Whitespace => out.push(stemmed),
                    TokenizerMode::Character => {
                        let chars: Vec<String> =
                            stemmed.chars().filter(|c| !c.is_whitespace() && !is_punct(*c)).map(String::from).collect();
                        if chars.is_empty() {
                            out.extend(stemmed.chars().filter(|c| !c.is_whitespace()).map(String::from));
                        } else {
                            out.extend(chars);
                        }
                    }
                }
            }
            if out.len() == start {
                out.push(token.clone());
            }
            alignment.push(start..out.len());
        }
        Ok((out, alignment))
    }

    /// Build a [`Sentence`] from raw treebank tokens.
    pub fn sentence(&self, id: impl Into<String>, raw: Vec<String>) -> Result<Sentence> {
        let (norm, alignment) = self.normalize_tokens(&raw)?;
        Sentence::new(id, raw, norm, alignment)
    }

    /// Tokenize and normalize free text such as an LLM generation.
    /// Punctuation-only tokens are dropped; an empty result is allowed.
    pub fn normalize_text(&self, text: &str) -> Vec<String> {
        let raw = tokenize_text(text);
        if raw.is_empty() {
            return Vec::new();
        }
        self.normalize_tokens(&raw).map(|(t, _)| t).unwrap_or_default()
    }
}

/// Whitespace tokenization for generated text, dropping tokens that are
/// only punctuation. Attached punctuation is removed later by normalization.
pub fn tokenize_text(text: &str) -> Vec<String> {
    text.split_whitespace().filter(|t| !is_punctuation_token(t)).map(String::from).collect()
}

/// Normalize `raw_tokens` under `config`.
pub fn normalize_sentence(raw_tokens: &[String], config: &NormalizerConfig) -> Result<(Vec<String>, Vec<Range<usize>>)> {
    config.build()?.normalize_tokens(raw_tokens)
}

/// Stem one token under `config`.
pub fn stem(token: &str, config: &NormalizerConfig) -> String {
    config.stemmer.build().stem(token)
}
