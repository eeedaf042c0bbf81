use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::RunConfig;

#[derive(Debug, Parser)]
#[command(name = "spanoverlap", version, about = "Unsupervised constituency parsing from paraphrase span overlap")]
pub struct Cli {
    /// Run configuration file (TOML); flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Seed for random baselines.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for per-sentence stages.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Never call the model; only cached replies from the store are used.
    #[arg(long, global = true)]
    pub offline: bool,
    /// Language code of the corpus (en, zh, fr, de, ...).
    #[arg(long, global = true)]
    pub language: Option<String>,
    /// Directory for outputs and the default store.
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
    /// More logging (-v info, -vv debug).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Request paraphrases for every gold sentence and append them to the store.
    Generate(GenerateArgs),
    /// Score spans against the stored paraphrases and decode trees.
    Parse(ParseArgs),
    /// Sentence-F1 of bracketed predictions against gold trees.
    Evaluate(EvaluateArgs),
    /// Score statistics by phrase type and constituent identification.
    Analyze(AnalyzeArgs),
    /// Parse and evaluate with paraphrases from subsets of instruction families.
    Ablate(AblateArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Gold treebank, one bracketed tree per line.
    #[arg(long, value_name = "FILE")]
    pub gold: Option<PathBuf>,
    /// Trees may span several lines.
    #[arg(long)]
    pub multiline: bool,
    /// Skip malformed gold trees with a warning.
    #[arg(long)]
    pub skip_bad_trees: bool,
}

#[derive(Debug, Args)]
pub struct StoreArgs {
    /// Paraphrase store (JSONL).
    #[arg(long, value_name = "FILE")]
    pub store: Option<PathBuf>,
    /// Model name recorded in (and selected from) the store.
    #[arg(long)]
    pub model: Option<String>,
    /// Instruction families: `all` or names joined by `,` or `+`.
    #[arg(long)]
    pub families: Option<String>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Stemmer: `identity` or `snowball:<language>`.
    #[arg(long)]
    pub stemmer: Option<String>,
    /// Same as `--stemmer identity`.
    #[arg(long, conflicts_with = "stemmer")]
    pub no_stem: bool,
    #[arg(long)]
    pub no_case_fold: bool,
    #[arg(long)]
    pub no_contractions: bool,
    /// Treat every character as a token.
    #[arg(long)]
    pub char_mode: bool,
    /// Contraction table (TSV) replacing the built-in one.
    #[arg(long, value_name = "FILE")]
    pub contractions_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PunctArgs {
    /// Punctuation preterminal tags, whitespace-separated.
    #[arg(long, value_name = "TAGS", allow_hyphen_values = true)]
    pub punct_tags: Option<String>,
    /// Also drop leaves made only of punctuation characters.
    #[arg(long)]
    pub punct_token_fallback: bool,
    /// Keep `-NONE-` empty elements.
    #[arg(long)]
    pub keep_empty_elements: bool,
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Span scorer: exact, bleu, meteor or random.
    #[arg(long)]
    pub scorer: Option<String>,
    /// Collapse duplicate paraphrases before scoring.
    #[arg(long)]
    pub dedup: bool,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub store: StoreArgs,
    /// Chat-completions endpoint base, e.g. http://host/v1.
    #[arg(long)]
    pub base_url: Option<String>,
    /// Completions per sub-instruction.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub temperature: Option<f64>,
    #[arg(long)]
    pub max_retries: Option<u32>,
}

#[derive(Debug, Args)]
pub struct ParseArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub store: StoreArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub punct: PunctArgs,
    #[command(flatten)]
    pub score: ScoreArgs,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Predicted trees, one bracketed tree per line in corpus order.
    #[arg(long, value_name = "FILE")]
    pub pred: PathBuf,
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub punct: PunctArgs,
    /// Recover malformed predictions and align mismatched leaves by common prefix.
    #[arg(long)]
    pub lenient: bool,
    #[arg(long)]
    pub min_sentence_len: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub store: StoreArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub punct: PunctArgs,
    #[command(flatten)]
    pub score: ScoreArgs,
    /// Minimum spans per emitted statistics row (0 disables).
    #[arg(long)]
    pub min_occurrences: Option<usize>,
    /// Seeds averaged for the random identification baseline.
    #[arg(long)]
    pub random_seeds: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[command(flatten)]
    pub store: StoreArgs,
    #[command(flatten)]
    pub norm: NormArgs,
    #[command(flatten)]
    pub punct: PunctArgs,
    #[command(flatten)]
    pub score: ScoreArgs,
    /// Family subset to evaluate; repeatable. Default: each family alone, then all.
    #[arg(long = "subset", value_name = "FAMILIES")]
    pub subsets: Vec<String>,
}

impl Cli {
    pub fn apply_globals(&self, cfg: &mut RunConfig) {
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        if let Some(v) = &self.language {
            cfg.language = v.clone();
        }
        if let Some(v) = &self.out_dir {
            cfg.output_dir = v.clone();
        }
    }
}

impl CorpusArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.gold {
            cfg.corpus.gold = Some(v.clone());
        }
        cfg.corpus.multiline |= self.multiline;
        cfg.corpus.lenient |= self.skip_bad_trees;
    }
}

impl StoreArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.store {
            cfg.store = Some(v.clone());
        }
        if let Some(v) = &self.model {
            cfg.llm.model = v.clone();
        }
        if let Some(v) = &self.families {
            cfg.scoring.families = v.clone();
        }
    }
}

impl NormArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        let n = &mut cfg.normalizer;
        if let Some(v) = &self.stemmer {
            n.stemmer = Some(v.clone());
        }
        if self.no_stem {
            n.stemmer = Some("identity".into());
        }
        if self.no_case_fold {
            n.case_fold = Some(false);
        }
        if self.no_contractions {
            n.expand_contractions = Some(false);
        }
        if self.char_mode {
            n.char_mode = Some(true);
        }
        if let Some(v) = &self.contractions_file {
            n.contractions_file = Some(v.clone());
        }
    }
}

impl PunctArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.punct_tags {
            cfg.eval.punct_tags = v.split_whitespace().map(String::from).collect();
        }
        cfg.eval.punct_token_fallback |= self.punct_token_fallback;
        cfg.eval.keep_empty_elements |= self.keep_empty_elements;
    }
}

impl ScoreArgs {
    pub fn apply(&self, cfg: &mut RunConfig) {
        if let Some(v) = &self.scorer {
            cfg.scoring.scorer = v.clone();
        }
        cfg.scoring.dedup |= self.dedup;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn unknown_flag_is_an_error() {
        assert!(Cli::try_parse_from(["spanoverlap", "parse", "--bogus"]).is_err());
        assert!(Cli::try_parse_from(["spanoverlap", "parse", "--gold", "g.txt", "--seed", "3"]).is_ok());
    }

    #[test]
    fn flags_override_config() {
        let cli = Cli::try_parse_from([
            "spanoverlap", "--seed", "9", "parse", "--gold", "g", "--scorer", "bleu", "--no-stem", "--punct-tags", ". ,",
        ])
        .unwrap();
        let mut cfg = RunConfig::default();
        cli.apply_globals(&mut cfg);
        let Command::Parse(p) = &cli.command else { panic!() };
        p.corpus.apply(&mut cfg);
        p.norm.apply(&mut cfg);
        p.punct.apply(&mut cfg);
        p.score.apply(&mut cfg);
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.scoring.scorer, "bleu");
        assert_eq!(cfg.normalizer.stemmer.as_deref(), Some("identity"));
        assert_eq!(cfg.eval.punct_tags, vec![".", ","]);
    }
}
