//! Run configuration: one TOML file, every field defaulted, overridden by
//! command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use spanoverlap::analyze::PhraseClassMap;
use spanoverlap::evaluate::EvalFilter;
use spanoverlap::generate::{Family, Gating, LlmClientConfig};
use spanoverlap::normalize::{NormalizerConfig, StemmerKind, TokenizerMode};
use spanoverlap::overlap::{BleuParams, ChartOptions, MatchScorer, MeteorParams};
use spanoverlap::pipeline::{ParseOptions, ScorerKind};
use spanoverlap::treebank::{LoadOptions, PunctSpec, DEFAULT_PUNCT_TAGS};

use crate::UsageError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub language: String,
    pub seed: u64,
    pub jobs: usize,
    pub output_dir: PathBuf,
    pub corpus: CorpusSection,
    /// Paraphrase store (JSONL). Defaults to `<output_dir>/paraphrases.jsonl`.
    pub store: Option<PathBuf>,
    pub normalizer: NormalizerSection,
    pub scoring: ScoringSection,
    pub llm: LlmClientConfig,
    pub gating: Gating,
    pub eval: EvalSection,
    pub analysis: AnalysisSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            language: "en".into(),
            seed: 0,
            jobs: 1,
            output_dir: PathBuf::from("out"),
            corpus: CorpusSection::default(),
            store: None,
            normalizer: NormalizerSection::default(),
            scoring: ScoringSection::default(),
            llm: LlmClientConfig::default(),
            gating: Gating::default(),
            eval: EvalSection::default(),
            analysis: AnalysisSection::default(),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusSection {
    pub gold: Option<PathBuf>,
    pub multiline: bool,
    /// Skip malformed gold trees instead of failing.
    pub lenient: bool,
    pub keep_function_tags: bool,
    pub split: Option<String>,
}

/// Unset fields take the language default.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizerSection {
    /// `identity` or `snowball:<language>`.
    pub stemmer: Option<String>,
    pub case_fold: Option<bool>,
    pub expand_contractions: Option<bool>,
    pub char_mode: Option<bool>,
    /// Replacement contraction table (TSV).
    pub contractions_file: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringSection {
    /// `exact`, `bleu`, `meteor` or `random`.
    pub scorer: String,
    /// `all` or family names joined by `,` or `+`.
    pub families: String,
    pub dedup: bool,
    pub meteor_perfect_match_exemption: bool,
}

impl Default for ScoringSection {
    fn default() -> Self {
        ScoringSection { scorer: "exact".into(), families: "all".into(), dedup: false, meteor_perfect_match_exemption: true }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSection {
    pub punct_tags: Vec<String>,
    /// Also drop tokens made only of punctuation characters.
    pub punct_token_fallback: bool,
    pub keep_empty_elements: bool,
    pub min_sentence_len: usize,
    pub keep_trivial: bool,
}

impl Default for EvalSection {
    fn default() -> Self {
        EvalSection {
            punct_tags: DEFAULT_PUNCT_TAGS.iter().map(|s| s.to_string()).collect(),
            punct_token_fallback: false,
            keep_empty_elements: false,
            min_sentence_len: 2,
            keep_trivial: false,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisSection {
    pub classes: PhraseClassMap,
    /// Number of seeds for the random baseline, starting at the run seed.
    pub random_seeds: u64,
    /// Family subsets for `ablate`; empty means every single family plus all.
    pub ablation_subsets: Vec<String>,
}

impl Default for AnalysisSection {
    fn default() -> Self {
        AnalysisSection { classes: PhraseClassMap::default(), random_seeds: 10, ablation_subsets: Vec::new() }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())).into())
    }

    pub fn store_path(&self) -> PathBuf {
        self.store.clone().unwrap_or_else(|| self.output_dir.join("paraphrases.jsonl"))
    }

    pub fn gold_path(&self) -> Result<&Path> {
        self.corpus.gold.as_deref().ok_or_else(|| UsageError("no gold corpus given (--gold)".into()).into())
    }

    pub fn load_options(&self) -> LoadOptions {
        LoadOptions {
            multiline: self.corpus.multiline,
            lenient: self.corpus.lenient,
            strip_function_tags: !self.corpus.keep_function_tags,
            language: self.language.clone(),
            split: self.corpus.split.clone().unwrap_or_else(|| "dev".into()),
        }
    }

    pub fn normalizer_config(&self) -> Result<NormalizerConfig> {
        let mut c = NormalizerConfig::for_language(&self.language);
        let n = &self.normalizer;
        if let Some(s) = &n.stemmer {
            c.stemmer = s.parse::<StemmerKind>().map_err(|e| UsageError(e.to_string()))?;
        }
        if let Some(v) = n.case_fold {
            c.case_fold = v;
        }
        if let Some(v) = n.expand_contractions {
            c.expand_contractions = v;
        }
        if let Some(v) = n.char_mode {
            c.tokenizer_mode = if v { TokenizerMode::Character } else { TokenizerMode::Whitespace };
        }
        c.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(c)
    }

    pub fn normalizer(&self) -> Result<spanoverlap::normalize::Normalizer> {
        let c = self.normalizer_config()?;
        Ok(match &self.normalizer.contractions_file {
            Some(p) => c.build_with_table_file(p)?,
            None => c.build()?,
        })
    }

    pub fn families(&self) -> Result<std::collections::BTreeSet<Family>> {
        Family::parse_set(&self.scoring.families).map_err(|e| UsageError(e.to_string()).into())
    }

    pub fn punct_spec(&self) -> PunctSpec {
        let mut p = PunctSpec { tags: self.eval.punct_tags.iter().cloned().collect(), ..PunctSpec::default() };
        if self.eval.punct_token_fallback {
            p = p.with_token_fallback();
        }
        p.drop_empty_elements = !self.eval.keep_empty_elements;
        p
    }

    pub fn eval_filter(&self) -> EvalFilter {
        EvalFilter { drop_trivial: !self.eval.keep_trivial, drop_duplicates: true, min_sentence_len: self.eval.min_sentence_len }
    }

    pub fn scorer(&self) -> Result<ScorerKind> {
        let meteor = MeteorParams { perfect_match_exemption: self.scoring.meteor_perfect_match_exemption, ..Default::default() };
        Ok(match self.scoring.scorer.as_str() {
            "exact" => ScorerKind::Match(MatchScorer::Exact),
            "bleu" => ScorerKind::Match(MatchScorer::Bleu(BleuParams::default())),
            "meteor" => ScorerKind::Match(MatchScorer::Meteor(meteor)),
            "random" => ScorerKind::Random { seed: self.seed },
            other => return Err(UsageError(format!("unknown scorer {other:?} (exact, bleu, meteor, random)")).into()),
        })
    }

    pub fn parse_options(&self) -> Result<ParseOptions> {
        Ok(ParseOptions {
            scorer: self.scorer()?,
            chart: ChartOptions { empty_fallback: true, dedup: self.scoring.dedup },
        })
    }
}
