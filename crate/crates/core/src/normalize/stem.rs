use std::fmt;
use std::str::FromStr;

use rust_stemmers::{Algorithm, Stemmer as Snowball};

use crate::Error;

/// Stemmers selectable per language. Languages without an available stemmer
/// use [`StemmerKind::Identity`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StemmerKind {
    Identity,
    Snowball(SnowballLanguage),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SnowballLanguage {
    English,
    French,
    German,
    Hungarian,
    Swedish,
}

impl SnowballLanguage {
    fn algorithm(self) -> Algorithm {
        match self {
            SnowballLanguage::English => Algorithm::English,
            SnowballLanguage::French => Algorithm::French,
            SnowballLanguage::German => Algorithm::German,
            SnowballLanguage::Hungarian => Algorithm::Hungarian,
            SnowballLanguage::Swedish => Algorithm::Swedish,
        }
    }

    fn name(self) -> &'static str {
        match self {
            SnowballLanguage::English => "english",
            SnowballLanguage::French => "french",
            SnowballLanguage::German => "german",
            SnowballLanguage::Hungarian => "hungarian",
            SnowballLanguage::Swedish => "swedish",
        }
    }
}

impl StemmerKind {
    /// Default stemmer for a language code.
    pub fn for_language(code: &str) -> Self {
        use SnowballLanguage::*;
        match code {
            "en" => StemmerKind::Snowball(English),
            "fr" => StemmerKind::Snowball(French),
            "de" => StemmerKind::Snowball(German),
            "hu" => StemmerKind::Snowball(Hungarian),
            "sv" => StemmerKind::Snowball(Swedish),
            // No Basque or Polish stemmer is available; Chinese, Korean and
            // Hebrew are left unstemmed.
            _ => StemmerKind::Identity,
        }
    }

    pub fn build(self) -> TokenStemmer {
        TokenStemmer { inner: match self {
            StemmerKind::Identity => None,
            StemmerKind::Snowball(l) => Some(Snowball::create(l.algorithm())),
        } }
    }
}

impl fmt::Display for StemmerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StemmerKind::Identity => f.write_str("identity"),
            StemmerKind::Snowball(l) => write!(f, "snowball:{}", l.name()),
        }
    }
}

impl FromStr for StemmerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        use SnowballLanguage::*;
        Ok(match s {
            "identity" | "none" => StemmerKind::Identity,
            "snowball:english" => StemmerKind::Snowball(English),
            "snowball:french" => StemmerKind::Snowball(French),
            "snowball:german" => StemmerKind::Snowball(German),
            "snowball:hungarian" => StemmerKind::Snowball(Hungarian),
            "snowball:swedish" => StemmerKind::Snowball(Swedish),
            other => return Err(Error::Config(format!("unknown stemmer `{other}`"))),
        })
    }
}

/// A constructed stemmer. Stems are taken to a fixpoint so that stemming a
/// stem is a no-op, and never come back empty.
pub struct TokenStemmer {
    inner: Option<Snowball>,
}

const MAX_PASSES: usize = 4;

impl TokenStemmer {
    pub fn stem(&self, token: &str) -> String {
        let Some(stemmer) = &self.inner else {
            return token.to_string();
        };
        let mut current = token.to_string();
        for _ in 0..MAX_PASSES {
            let next = stemmer.stem(&current);
            if next.is_empty() || next == current {
                break;
            }
            current = next.into_owned();
        }
        current
    }
}

impl fmt::Debug for TokenStemmer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TokenStemmer").field("snowball", &self.inner.is_some()).finish()
    }
}
