//! Unsupervised constituency parsing by span overlap.
//!
//! A target sentence is paraphrased many times by an instruction-following
//! language model under transformations that keep its predicate-argument
//! structure fixed (movement, clefting, passivization, ...). Every word
//! sequence of the target is then scored by the fraction of paraphrases that
//! contain it, and the binary tree with the highest total score is decoded
//! with a CKY-style Viterbi pass.
//!
//! The crate is organised bottom-up:
//!
//! * [`span`], [`tree`], [`sentence`], [`chart`]: shared domain types.
//! * [`treebank`]: bracketed treebank I/O, punctuation stripping, label maps.
//! * [`normalize`]: stemming, contraction expansion, case folding.
//! * [`overlap`]: exact and fuzzy span-overlap scoring.
//! * [`decode`]: maximum-score binary tree decoding.
//! * [`generate`]: prompt templates, chat-completions client, record store.
//! * [`evaluate`]: unlabeled sentence-F1.
//! * [`analyze`]: score statistics, identification proportions, ablations.
//! * [`pipeline`]: glue used by the CLI and the ablation driver.

pub mod analyze;
pub mod chart;
pub mod decode;
mod error;
pub mod evaluate;
pub mod generate;
pub mod normalize;
pub mod overlap;
pub mod pipeline;
pub mod sentence;
pub mod span;
pub mod tree;
pub mod treebank;

pub use chart::ScoreChart;
pub use error::{Error, Result};
pub use sentence::Sentence;
pub use span::{enumerate_spans, is_partial_overlap, Span};
pub use tree::{LabeledSpan, LabeledTree};
