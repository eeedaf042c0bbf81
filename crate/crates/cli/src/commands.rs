use std::collections::BTreeSet;

use anyhow::{Context, Result};
use log::{info, warn};
use serde::Serialize;
use spanoverlap::analyze::{
    ablation_run, identification_proportion, random_identification_proportion, score_stats_by_label, AblationInput,
    EVENT_GROUP, PARTICIPANT_GROUP, RANDOM_GROUP,
};
use spanoverlap::evaluate::{evaluate_external, LeafMatch};
use spanoverlap::generate::{read_records, target_text, ChatClient, Family, GenerationRecord, Generator, RecordStore};
use spanoverlap::normalize::{Normalizer, NormalizerConfig};
use spanoverlap::pipeline::{paraphrase_sets, parse_corpus, prepare_corpus, ParsedSentence};
use spanoverlap::treebank::{load_corpus, Corpus, LabelMap};

use crate::args::{AblateArgs, AnalyzeArgs, Cli, Command, EvaluateArgs, GenerateArgs, ParseArgs};
use crate::config::RunConfig;
use crate::report::{ensure_dir, write_charts, write_csv, write_json, write_predictions};
use crate::UsageError;

pub fn run(cli: Cli) -> Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    cli.apply_globals(&mut cfg);
    match &cli.command {
        Command::Generate(a) => generate(cfg, a, cli.offline),
        Command::Parse(a) => parse(cfg, a),
        Command::Evaluate(a) => evaluate(cfg, a),
        Command::Analyze(a) => analyze(cfg, a),
        Command::Ablate(a) => ablate(cfg, a),
    }
}

fn load_gold(cfg: &RunConfig) -> Result<Corpus> {
    let (corpus, warnings) = load_corpus(cfg.gold_path()?, &cfg.load_options())?;
    if !warnings.is_empty() {
        warn!("{} malformed gold trees skipped", warnings.len());
    }
    Ok(corpus)
}

/// Gold corpus with punctuation stripped, labels merged and tokens normalized.
fn prepared_gold(cfg: &RunConfig, normalizer: &Normalizer) -> Result<Corpus> {
    let corpus = load_gold(cfg)?;
    let (prepared, dropped) = prepare_corpus(&corpus, &cfg.punct_spec(), &LabelMap::builtin(&cfg.language), normalizer)?;
    if !dropped.is_empty() {
        warn!("{} sentences made only of punctuation dropped", dropped.len());
    }
    Ok(prepared)
}

fn load_store(cfg: &RunConfig) -> Result<Vec<GenerationRecord>> {
    let path = cfg.store_path();
    if !path.exists() {
        anyhow::bail!("paraphrase store {} does not exist; run `generate` first", path.display());
    }
    Ok(read_records(&path)?)
}

fn selected_tags(cfg: &RunConfig, families: &BTreeSet<Family>) -> BTreeSet<String> {
    cfg.gating.select(families, &cfg.language).iter().map(|t| t.tag()).collect()
}

fn generate(mut cfg: RunConfig, a: &GenerateArgs, offline: bool) -> Result<()> {
    a.corpus.apply(&mut cfg);
    a.store.apply(&mut cfg);
    if let Some(v) = &a.base_url {
        cfg.llm.base_url = v.clone();
    }
    if let Some(v) = a.samples {
        cfg.llm.samples_per_instruction = v;
    }
    if let Some(v) = a.temperature {
        cfg.llm.temperature = v;
    }
    if let Some(v) = a.max_retries {
        cfg.llm.max_retries = v;
    }
    let families = cfg.families()?;
    let corpus = load_gold(&cfg)?;
    let path = cfg.store_path();
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        ensure_dir(dir)?;
    }
    let store = RecordStore::open(&path)?;
    let client = if offline { None } else { Some(ChatClient::from_env(cfg.llm.clone())?) };
    let generator = Generator::new(cfg.llm.clone(), client, store, &cfg.language, cfg.gating.clone())?;
    let targets: Vec<_> = corpus.entries.iter().map(|e| (e.sentence.id.clone(), target_text(&e.sentence))).collect();
    let summary = generator.run(&targets, &families, cfg.jobs)?;
    if summary.failed > 0 {
        warn!("{} prompts without a reply", summary.failed);
    }
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn parse(mut cfg: RunConfig, a: &ParseArgs) -> Result<()> {
    a.corpus.apply(&mut cfg);
    a.store.apply(&mut cfg);
    a.norm.apply(&mut cfg);
    a.punct.apply(&mut cfg);
    a.score.apply(&mut cfg);
    let parsed = parse_with(&cfg, &cfg.families()?)?.1;
    ensure_dir(&cfg.output_dir)?;
    write_predictions(&cfg.output_dir.join("predictions.txt"), &parsed)?;
    write_charts(&cfg.output_dir.join("charts.jsonl"), &parsed)?;
    let fallback = parsed.iter().filter(|p| p.fallback).count();
    if fallback > 0 {
        warn!("{fallback} sentences had no paraphrases and were parsed from an all-zero chart");
    }
    println!("parsed {} sentences into {}", parsed.len(), cfg.output_dir.display());
    Ok(())
}

fn parse_with(cfg: &RunConfig, families: &BTreeSet<Family>) -> Result<(Corpus, Vec<ParsedSentence>)> {
    let normalizer = cfg.normalizer()?;
    let gold = prepared_gold(cfg, &normalizer)?;
    let opts = cfg.parse_options()?;
    let records = load_store(cfg)?;
    let sets = paraphrase_sets(&records, &selected_tags(cfg, families), Some(&cfg.llm.model), &normalizer);
    info!("{} paraphrase sets for {} sentences", sets.len(), gold.len());
    let parsed = parse_corpus(&gold, &sets, &opts, cfg.jobs)?;
    Ok((gold, parsed))
}

fn evaluate(mut cfg: RunConfig, a: &EvaluateArgs) -> Result<()> {
    a.corpus.apply(&mut cfg);
    a.punct.apply(&mut cfg);
    if let Some(v) = a.min_sentence_len {
        cfg.eval.min_sentence_len = v;
    }
    let normalizer = NormalizerConfig::identity(&cfg.language).build()?;
    let gold = prepared_gold(&cfg, &normalizer)?;
    let text = std::fs::read_to_string(&a.pred).with_context(|| format!("reading {}", a.pred.display()))?;
    let mode = if a.lenient { LeafMatch::Lenient } else { LeafMatch::Strict };
    let report = evaluate_external(&text, &gold, &cfg.punct_spec(), &cfg.eval_filter(), mode)?;
    ensure_dir(&cfg.output_dir)?;
    write_csv(&cfg.output_dir.join("eval_report.csv"), &report.sentences)?;
    write_json(&cfg.output_dir.join("eval_summary.json"), &report)?;
    println!("SF1 {:.4} over {} sentences ({} skipped)", report.mean_sf1, report.evaluated, report.skipped);
    Ok(())
}

#[derive(Serialize)]
struct AnalysisSummary {
    scorer: String,
    participant_mean: Option<f64>,
    event_mean: Option<f64>,
    random_mean: Option<f64>,
    identification: Option<f64>,
    random_identification: Option<f64>,
    random_seeds: Vec<u64>,
}

fn analyze(mut cfg: RunConfig, a: &AnalyzeArgs) -> Result<()> {
    a.corpus.apply(&mut cfg);
    a.store.apply(&mut cfg);
    a.norm.apply(&mut cfg);
    a.punct.apply(&mut cfg);
    a.score.apply(&mut cfg);
    if let Some(v) = a.min_occurrences {
        cfg.analysis.classes.min_occurrences = v;
    }
    if let Some(v) = a.random_seeds {
        cfg.analysis.random_seeds = v;
    }
    let scorer = cfg.scorer()?.name().to_string();
    let (gold, parsed) = parse_with(&cfg, &cfg.families()?)?;
    let charts: Vec<_> = parsed.into_iter().map(|p| p.chart).collect();
    let stats = score_stats_by_label(&gold, &charts, &cfg.analysis.classes, Some(cfg.seed))?;
    let seeds: Vec<u64> = (0..cfg.analysis.random_seeds).map(|k| cfg.seed + k).collect();
    let mut proportions = identification_proportion(&charts, &gold, &scorer, true)?;
    if !seeds.is_empty() {
        proportions.extend(random_identification_proportion(&gold, &seeds, true)?);
    }
    let overall = |group: &str| stats.iter().find(|r| r.group == group && r.bucket == "all").map(|r| r.mean);
    let proportion = |tag: &str| proportions.iter().find(|r| r.scorer == tag && r.bucket == "all").map(|r| r.proportion);
    let summary = AnalysisSummary {
        participant_mean: overall(PARTICIPANT_GROUP),
        event_mean: overall(EVENT_GROUP),
        random_mean: overall(RANDOM_GROUP),
        identification: proportion(&scorer),
        random_identification: proportion(RANDOM_GROUP),
        scorer,
        random_seeds: seeds,
    };
    ensure_dir(&cfg.output_dir)?;
    write_csv(&cfg.output_dir.join("score_stats.csv"), &stats)?;
    write_csv(&cfg.output_dir.join("identification.csv"), &proportions)?;
    write_json(&cfg.output_dir.join("analysis_summary.json"), &summary)?;
    println!("{}", serde_json::to_string(&summary)?);
    Ok(())
}

fn ablate(mut cfg: RunConfig, a: &AblateArgs) -> Result<()> {
    a.corpus.apply(&mut cfg);
    a.store.apply(&mut cfg);
    a.norm.apply(&mut cfg);
    a.punct.apply(&mut cfg);
    a.score.apply(&mut cfg);
    if !a.subsets.is_empty() {
        cfg.analysis.ablation_subsets = a.subsets.clone();
    }
    let subsets: Vec<BTreeSet<Family>> = if cfg.analysis.ablation_subsets.is_empty() {
        Family::ALL.iter().map(|f| BTreeSet::from([*f])).chain([Family::ALL.into()]).collect()
    } else {
        cfg.analysis
            .ablation_subsets
            .iter()
            .map(|s| Family::parse_set(s).map_err(|e| UsageError(e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let normalizer = cfg.normalizer()?;
    let gold = prepared_gold(&cfg, &normalizer)?;
    let records = load_store(&cfg)?;
    let opts = cfg.parse_options()?;
    let filter = cfg.eval_filter();
    let input = AblationInput {
        corpus: &gold,
        records: &records,
        model: Some(&cfg.llm.model),
        normalizer: &normalizer,
        gating: &cfg.gating,
        parse: &opts,
        filter: &filter,
        jobs: cfg.jobs,
    };
    let outcomes = ablation_run(&input, &subsets)?;
    let dir = cfg.output_dir.join("ablation");
    ensure_dir(&dir)?;
    for o in &outcomes {
        write_predictions(&dir.join(format!("{}.txt", o.row.families)), &o.parsed)?;
        println!("{}\t{:.4}", o.row.families, o.row.mean_sf1);
    }
    let rows: Vec<_> = outcomes.into_iter().map(|o| o.row).collect();
    write_csv(&cfg.output_dir.join("ablation.csv"), &rows)?;
    Ok(())
}
