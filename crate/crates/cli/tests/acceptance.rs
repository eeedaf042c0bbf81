//! Acceptance criteria, one pass/fail line each. Runs without the libtest
//! harness so the lines appear in order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spanoverlap::analyze::{identification_proportion, is_identified, skewness};
use spanoverlap::decode::{exhaustive_parse, viterbi_parse};
use spanoverlap::evaluate::{filter_spans, sentence_f1, EvalFilter};
use spanoverlap::generate::mock::{chat_body, MockResponse, MockServer};
use spanoverlap::generate::{read_records, ChatClient, Family, Gating, LlmClientConfig};
use spanoverlap::normalize::{expand_contractions, NormalizerConfig};
use spanoverlap::overlap::{
    exact_span_score, fuzzy_span_score, score_chart, span_hit_count, BleuParams, ChartOptions, MatchScorer,
    MeteorParams, ParaphraseSet, WindowIndex,
};
use spanoverlap::pipeline::{evaluate_parsed, paraphrase_sets, parse_corpus, prepare_corpus, ParseOptions, ScorerKind};
use spanoverlap::treebank::{load_corpus, LabelMap, LoadOptions, PunctSpec};
use spanoverlap::{enumerate_spans, ScoreChart, Sentence, Span};

/// Mean SF1 of the seeded random scorer on the fixture over seeds 0..10,
/// computed once and frozen.
const RANDOM_FIXTURE_SF1: f64 = 0.4733333333333334;

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg.into()) }
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spanoverlap"));
    c.env("SOURCE_DATE_EPOCH", "1700000000").env_remove("RUST_LOG");
    c
}

fn run(cmd: &mut Command) -> Result<String, String> {
    let out = cmd.output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{:?} failed: {}", cmd, String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn toks(rng: &mut ChaCha8Rng, len: usize, vocab: u8) -> Vec<String> {
    (0..len).map(|_| ((b'a' + rng.gen_range(0..vocab)) as char).to_string()).collect()
}

fn random_instance(rng: &mut ChaCha8Rng) -> (Sentence, ParaphraseSet) {
    let vocab = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=8);
    let w = Sentence::identity("r", toks(rng, n, vocab)).unwrap();
    let mut s = ParaphraseSet::new("r");
    for _ in 0..rng.gen_range(1..=10) {
        let len = rng.gen_range(0..=10);
        s.push("x.y", toks(rng, len, vocab));
    }
    (w, s)
}

/// Items containing `needle` contiguously, by explicit position loops.
fn brute_count(needle: &[String], s: &ParaphraseSet) -> usize {
    let mut count = 0;
    for item in &s.items {
        let mut found = false;
        let mut start = 0;
        while !found && start + needle.len() <= item.tokens.len() {
            let mut k = 0;
            while k < needle.len() && item.tokens[start + k] == needle[k] {
                k += 1;
            }
            found = k == needle.len();
            start += 1;
        }
        count += usize::from(found);
    }
    count
}

fn c1_decoder_oracle() -> Check {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut charts = 0;
    for n in 2..=8 {
        for k in 0..1000 {
            // every other chart on a coarse grid, to force ties
            let chart = ScoreChart::from_fn(n, |_| {
                if k % 2 == 0 { rng.gen::<f64>() } else { f64::from(rng.gen_range(0..4u8)) / 4.0 }
            })
            .unwrap();
            let v = viterbi_parse(&chart).unwrap();
            let e = exhaustive_parse(&chart).unwrap();
            ensure(v.total_score == e.total_score, format!("n={n} chart {k}: {} vs {}", v.total_score, e.total_score))?;
            ensure(v.tree == e.tree, format!("n={n} chart {k}: trees differ"))?;
            charts += 1;
        }
    }
    let t = started.elapsed();
    ensure(t < Duration::from_secs(30), format!("took {t:?}"))?;
    Ok(format!("{charts} charts identical, {:.2}s", t.as_secs_f64()))
}

fn c2_exact_counts() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut spans = 0;
    for inst in 0..1000 {
        let (w, s) = random_instance(&mut rng);
        let index = WindowIndex::build(&s, w.len());
        for span in enumerate_spans(w.len()).unwrap() {
            let needle = w.norm_slice(span);
            let expected = brute_count(needle, &s);
            ensure(index.count(needle) == expected, format!("instance {inst} {span}: index"))?;
            ensure(span_hit_count(&w, span, &s).unwrap() == expected, format!("instance {inst} {span}: counter"))?;
            spans += 1;
        }
    }
    Ok(format!("1000 instances, {spans} spans"))
}

fn c3_indicator_is_exact() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for inst in 0..1000 {
        let (w, s) = random_instance(&mut rng);
        let exact = score_chart(&w, &s, &MatchScorer::Exact, ChartOptions::default()).unwrap();
        for span in enumerate_spans(w.len()).unwrap() {
            let fuzzy = fuzzy_span_score(&w, span, &s, &MatchScorer::Exact).unwrap();
            let direct = exact_span_score(&w, span, &s).unwrap();
            ensure(fuzzy.to_bits() == exact.get(span).to_bits(), format!("instance {inst} {span}"))?;
            ensure(direct.to_bits() == fuzzy.to_bits(), format!("instance {inst} {span}"))?;
        }
    }
    Ok("1000 instances bit-identical".into())
}

fn c4_fuzzy_dominates() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let bleu = MatchScorer::Bleu(BleuParams::default());
    let meteor = MatchScorer::Meteor(MeteorParams::default());
    for inst in 0..1000 {
        let (w, s) = random_instance(&mut rng);
        let spans = enumerate_spans(w.len()).unwrap();
        for &span in &spans {
            let e = exact_span_score(&w, span, &s).unwrap();
            ensure(fuzzy_span_score(&w, span, &s, &bleu).unwrap() >= e, format!("bleu < exact, instance {inst} {span}"))?;
            ensure(fuzzy_span_score(&w, span, &s, &meteor).unwrap() >= e, format!("meteor < exact, instance {inst} {span}"))?;
            for &outer in spans.iter().filter(|o| o.contains(span)) {
                ensure(exact_span_score(&w, outer, &s).unwrap() <= e, format!("not monotone, instance {inst} {outer} over {span}"))?;
            }
        }
    }
    Ok("1000 instances".into())
}

fn c5_sentence_f1() -> Check {
    let set = |v: &[(usize, usize)]| v.iter().map(|&(i, j)| Span::of(i, j)).collect::<BTreeSet<_>>();
    ensure(sentence_f1(&set(&[(1, 2), (3, 4)]), &set(&[(1, 2), (2, 4)])) == 0.5, "0.5 case")?;
    ensure(sentence_f1(&set(&[]), &set(&[])) == 1.0, "both empty")?;
    let (raw, _) = load_corpus(&fixtures().join("gold.mrg"), &LoadOptions::default()).map_err(|e| e.to_string())?;
    let ident = NormalizerConfig::identity("en").build().unwrap();
    let (gold, _) = prepare_corpus(&raw, &PunctSpec::default(), &LabelMap::identity("en"), &ident).unwrap();
    let preds: BTreeMap<_, _> = gold.entries.iter().map(|e| (e.sentence.id.clone(), e.tree.spans())).collect();
    let r = spanoverlap::evaluate::corpus_sf1(&preds, &gold, &EvalFilter::default()).unwrap();
    ensure(r.mean_sf1 == 1.0, "gold vs gold")?;
    let f = EvalFilter::default();
    for n in 2..=6 {
        let kept = filter_spans(enumerate_spans(n).unwrap(), n, &f);
        ensure(kept.iter().all(|s| s.width() > 1 && *s != Span::of(1, n)), format!("n={n}: trivial span kept"))?;
        ensure(kept.len() == n * (n + 1) / 2 - n - 1, format!("n={n}: non-trivial span dropped"))?;
    }
    Ok("0.5, empty=1.0, gold=1.0, filter n=2..6".into())
}

fn random_sf1_on_fixture() -> f64 {
    let (raw, _) = load_corpus(&fixtures().join("gold.mrg"), &LoadOptions::default()).unwrap();
    let normalizer = NormalizerConfig::for_language("en").build().unwrap();
    let (gold, _) = prepare_corpus(&raw, &PunctSpec::default(), &LabelMap::builtin("en"), &normalizer).unwrap();
    let records = read_records(&fixtures().join("paraphrases.jsonl")).unwrap();
    let tags = Gating::default().select(&Family::ALL.into(), "en").iter().map(|t| t.tag()).collect();
    let sets = paraphrase_sets(&records, &tags, Some("fixture-model"), &normalizer);
    let total: f64 = (0..10)
        .map(|seed| {
            let opts = ParseOptions { scorer: ScorerKind::Random { seed }, ..Default::default() };
            let parsed = parse_corpus(&gold, &sets, &opts, 1).unwrap();
            evaluate_parsed(&parsed, &gold, &EvalFilter::default()).unwrap().mean_sf1
        })
        .sum();
    total / 10.0
}

/// generate --offline, parse, evaluate on a copy of the fixture store.
fn fixture_pipeline(dir: &Path, extra_parse: &[&str]) -> Result<String, String> {
    let store = dir.join("store.jsonl");
    if !store.exists() {
        std::fs::copy(fixtures().join("paraphrases.jsonl"), &store).map_err(|e| e.to_string())?;
    }
    let cfg = fixtures().join("fixture.toml");
    let gold = fixtures().join("gold.mrg");
    let common = |c: &mut Command| {
        c.arg("--config").arg(&cfg).arg("--out-dir").arg(dir);
    };
    let mut g = bin();
    common(&mut g);
    run(g.args(["--offline", "generate", "--gold"]).arg(&gold).arg("--store").arg(&store))?;
    let mut p = bin();
    common(&mut p);
    run(p.args(["parse", "--gold"]).arg(&gold).arg("--store").arg(&store).args(extra_parse))?;
    let mut e = bin();
    common(&mut e);
    run(e.args(["evaluate", "--gold"]).arg(&gold).arg("--pred").arg(dir.join("predictions.txt")))
}

fn c6_fixture_end_to_end() -> Check {
    let started = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = fixture_pipeline(dir.path(), &[])?;
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("eval_summary.json")).unwrap()).unwrap();
    let sf1 = summary["mean_sf1"].as_f64().unwrap_or(-1.0);
    ensure(sf1 == 1.0, format!("exact SF1 {sf1}: {out}"))?;
    let random = random_sf1_on_fixture();
    ensure(random < 0.8, format!("random SF1 {random}"))?;
    ensure((random - RANDOM_FIXTURE_SF1).abs() < 1e-12, format!("random SF1 {random} != frozen {RANDOM_FIXTURE_SF1}"))?;
    let t = started.elapsed();
    ensure(t < Duration::from_secs(10), format!("took {t:?}"))?;
    Ok(format!("exact SF1 1.0, random SF1 {random:.4} (10 seeds), {:.2}s", t.as_secs_f64()))
}

fn c7_analysis() -> Check {
    let g = skewness(&[1.0, 2.0, 3.0]).map_err(|e| e.to_string())?;
    ensure(g.abs() <= 1e-12, format!("skewness [1,2,3] = {g}"))?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let v: Vec<f64> = (0..rng.gen_range(3..30)).map(|_| rng.gen_range(-10.0..10.0)).collect();
        let base = skewness(&v).map_err(|e| e.to_string())?;
        let shift = rng.gen_range(-100.0..100.0);
        let scale = rng.gen_range(0.01..100.0);
        let t = skewness(&v.iter().map(|x| x + shift).collect::<Vec<_>>()).unwrap();
        let s = skewness(&v.iter().map(|x| x * scale).collect::<Vec<_>>()).unwrap();
        ensure((t - base).abs() <= 1e-9 && (s - base).abs() <= 1e-9, format!("invariance: {base} {t} {s}"))?;
    }
    // ties are not identified
    let tie = ScoreChart::from_fn(3, |s| if s == Span::of(1, 2) || s == Span::of(2, 3) { 0.5 } else { 0.1 }).unwrap();
    ensure(!is_identified(&tie, Span::of(1, 2)), "tie identified")?;
    let (raw, _) = load_corpus(&fixtures().join("gold.mrg"), &LoadOptions::default()).unwrap();
    let ident = NormalizerConfig::identity("en").build().unwrap();
    let (gold, _) = prepare_corpus(&raw, &PunctSpec::default(), &LabelMap::identity("en"), &ident).unwrap();
    let flat: Vec<_> = gold.entries.iter().map(|e| ScoreChart::from_fn(e.tree.len(), |_| 0.5).unwrap()).collect();
    let rows = identification_proportion(&flat, &gold, "flat", false).unwrap();
    ensure(rows[0].identified == 0, "constant chart identified constituents")?;
    // ablation over every family reproduces the main run byte for byte
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    fixture_pipeline(dir.path(), &[])?;
    let mut a = bin();
    a.arg("--config").arg(fixtures().join("fixture.toml")).arg("--out-dir").arg(dir.path());
    run(a.args(["ablate", "--subset", "movement", "--subset", "all", "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .arg("--store")
        .arg(dir.path().join("store.jsonl")))?;
    let main = std::fs::read(dir.path().join("predictions.txt")).unwrap();
    let all = std::fs::read(dir.path().join("ablation/all.txt")).map_err(|e| e.to_string())?;
    ensure(main == all, "ablation(all) differs from the main run")?;
    Ok("skewness, invariance 1e-9, strict ties, ablation(all) == main".into())
}

fn c8_normalize() -> Check {
    let split = expand_contractions(&["didn't".to_string()], "en");
    ensure(split == ["did", "n't"], format!("didn't -> {split:?}"))?;
    let cfg = NormalizerConfig::for_language("en");
    let stemmed = spanoverlap::normalize::stem("working", &cfg);
    ensure(stemmed == "work", format!("working -> {stemmed}"))?;
    let n = cfg.build().unwrap();
    let words = ["Didn't", "working", "apples", "can't", "John's", "\"quoted\"", "ran", "it's", "running", "a", "cats'", "won't", "The", "generously", "--"];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for k in 0..1000 {
        let raw: Vec<String> = (0..rng.gen_range(1..12)).map(|_| words[rng.gen_range(0..words.len())].to_string()).collect();
        let once = n.normalize_tokens(&raw).map_err(|e| e.to_string())?.0;
        let twice = n.normalize_tokens(&once).map_err(|e| e.to_string())?.0;
        ensure(once == twice, format!("list {k}: {raw:?} -> {once:?} -> {twice:?}"))?;
    }
    Ok("didn't, working, 1000 idempotent lists".into())
}

fn mock_reply(req: &spanoverlap::generate::mock::MockRequest) -> MockResponse {
    let prompt = req.prompt().unwrap_or_default();
    let target = prompt.lines().last().unwrap_or_default().trim_end_matches(" .").to_string();
    MockResponse::ok(chat_body(&format!("1. {target}.\n2. It is {target} indeed.")))
}

fn c9_mock_server() -> Check {
    // retry with backoff
    let server = MockServer::scripted(vec![MockResponse::status(429), MockResponse::status(429), MockResponse::ok(chat_body("a b"))]);
    let cfg = LlmClientConfig { base_url: server.base_url(), backoff_initial_ms: 5, backoff_max_ms: 20, ..Default::default() };
    let client = ChatClient::new(cfg, Some("k".into())).map_err(|e| e.to_string())?;
    let started = Instant::now();
    let c = client.complete("hello").map_err(|e| e.to_string())?;
    ensure(c.attempts == 3 && server.request_count() == 3, format!("{} attempts", c.attempts))?;
    ensure(started.elapsed() >= Duration::from_millis(15), "no backoff delay")?;

    // online run into a store, then two offline runs must match byte for byte
    let server = MockServer::with_handler(mock_reply);
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let store = dir.path().join("store.jsonl");
    let gold = fixtures().join("gold.mrg");
    run(bin()
        .env("SPANOVERLAP_API_KEY", "test-key")
        .args(["generate", "--families", "movement,clefting", "--base-url", &server.base_url(), "--gold"])
        .arg(&gold)
        .arg("--store")
        .arg(&store))?;
    let online_requests = server.request_count();
    ensure(online_requests == 50, format!("{online_requests} requests"))?;
    let mut outputs = Vec::new();
    for k in 0..2 {
        let out = dir.path().join(format!("run{k}"));
        run(bin()
            .args(["--offline", "--out-dir"])
            .arg(&out)
            .args(["generate", "--families", "movement,clefting", "--gold"])
            .arg(&gold)
            .arg("--store")
            .arg(&store))?;
        run(bin().arg("--out-dir").arg(&out).args(["parse", "--families", "movement,clefting", "--gold"]).arg(&gold).arg("--store").arg(&store))?;
        let bytes: Vec<Vec<u8>> = [store.clone(), out.join("predictions.txt"), out.join("charts.jsonl")]
            .iter()
            .map(|p| std::fs::read(p).unwrap())
            .collect();
        outputs.push(bytes);
    }
    ensure(outputs[0] == outputs[1], "offline runs differ")?;
    ensure(server.request_count() == online_requests, "offline run hit the network")?;

    // non-English prompts carry the language directive
    let server = MockServer::with_handler(mock_reply);
    let de_store = dir.path().join("de.jsonl");
    run(bin()
        .env("SPANOVERLAP_API_KEY", "test-key")
        .args(["--language", "de", "generate", "--families", "passivization", "--base-url", &server.base_url(), "--gold"])
        .arg(&gold)
        .arg("--store")
        .arg(&de_store))?;
    let prompts: Vec<String> = server.requests().iter().filter_map(|r| r.prompt()).collect();
    ensure(prompts.len() == 10, format!("{} German prompts", prompts.len()))?;
    ensure(
        prompts.iter().all(|p| p.contains("The generated sentences must be in German.")),
        "directive missing",
    )?;
    Ok("3 attempts with backoff, offline reruns byte-identical, German directive present".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("1 decoder matches exhaustive oracle", c1_decoder_oracle),
        ("2 exact scorer matches brute-force counts", c2_exact_counts),
        ("3 fuzzy indicator reproduces exact", c3_indicator_is_exact),
        ("4 fuzzy >= exact, exact monotone", c4_fuzzy_dominates),
        ("5 sentence F1 and span filtering", c5_sentence_f1),
        ("6 fixture pipeline", c6_fixture_end_to_end),
        ("7 analysis suite", c7_analysis),
        ("8 normalization", c8_normalize),
        ("9 mock server generation", c9_mock_server),
    ];
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, check) in criteria {
        if !args.is_empty() && !args.iter().any(|a| name.contains(a.as_str())) {
            continue;
        }
        match check() {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(why) => {
                failed += 1;
                println!("criterion {name}: FAIL ({why})");
            }
        }
    }
    println!("criterion 10 reproduction path: documented in README.md, not run");
    if failed > 0 {
        std::process::exit(1);
    }
}
