//! Bracketed treebank reading and writing, punctuation removal, and phrase
//! label normalization.

mod bracketed;
mod corpus;
mod labels;
mod punct;

pub use bracketed::{parse_bracketed, parse_bracketed_with, serialize_bracketed, ParseMode};
pub use corpus::{load_corpus, parse_corpus_text, Corpus, CorpusEntry, LoadOptions, LoadWarning};
pub use labels::{normalize_labels, strip_function_tags, LabelMap};
pub use punct::{strip_punctuation, PunctSpec, Stripped, DEFAULT_PUNCT_TAGS};
