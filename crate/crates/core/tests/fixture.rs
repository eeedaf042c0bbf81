//! The bundled fixture corpus: every gold constituent must out-score every
//! span crossing it, and exact scoring must recover the gold trees.

use std::collections::BTreeSet;
use std::path::PathBuf;

use spanoverlap::evaluate::EvalFilter;
use spanoverlap::generate::{read_records, Family, Gating};
use spanoverlap::normalize::NormalizerConfig;
use spanoverlap::pipeline::{evaluate_parsed, paraphrase_sets, parse_corpus, prepare_corpus, ParseOptions};
use spanoverlap::treebank::{load_corpus, Corpus, LabelMap, LoadOptions, PunctSpec};
use spanoverlap::{enumerate_spans, is_partial_overlap};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn setup() -> (Corpus, Vec<spanoverlap::pipeline::ParsedSentence>) {
    let (raw, _) = load_corpus(&fixture("gold.mrg"), &LoadOptions::default()).unwrap();
    let normalizer = NormalizerConfig::for_language("en").build().unwrap();
    let (gold, dropped) = prepare_corpus(&raw, &PunctSpec::default(), &LabelMap::builtin("en"), &normalizer).unwrap();
    assert!(dropped.is_empty());
    let records = read_records(&fixture("paraphrases.jsonl")).unwrap();
    let families: BTreeSet<Family> = Family::ALL.into();
    let tags = Gating::default().select(&families, "en").iter().map(|t| t.tag()).collect();
    let sets = paraphrase_sets(&records, &tags, Some("fixture-model"), &normalizer);
    assert_eq!(sets.len(), 10);
    let parsed = parse_corpus(&gold, &sets, &ParseOptions::default(), 2).unwrap();
    (gold, parsed)
}

#[test]
fn gold_constituents_are_strict_maximizers() {
    let (gold, parsed) = setup();
    let mut violations = Vec::new();
    for (e, p) in gold.entries.iter().zip(&parsed) {
        let n = e.tree.len();
        let constituents: Vec<_> = e.tree.spans().into_iter().filter(|s| !s.is_trivial(n)).collect();
        // binary up to preterminals
        assert_eq!(constituents.len(), n.saturating_sub(2), "sid {}", e.sentence.id);
        for g in constituents {
            for o in enumerate_spans(n).unwrap().into_iter().filter(|o| is_partial_overlap(*o, g)) {
                if p.chart.get(o) >= p.chart.get(g) {
                    violations.push(format!("sid {}: {g}={} vs {o}={}", e.sentence.id, p.chart.get(g), p.chart.get(o)));
                }
            }
        }
    }
    assert!(violations.is_empty(), "{violations:#?}");
}

#[test]
fn exact_scoring_recovers_gold() {
    let (gold, parsed) = setup();
    assert!(parsed.iter().all(|p| !p.fallback));
    for (e, p) in gold.entries.iter().zip(&parsed) {
        let n = e.tree.len();
        let g: BTreeSet<_> = e.tree.spans().into_iter().filter(|s| !s.is_trivial(n)).collect();
        let q: BTreeSet<_> = p.tree.spans().into_iter().filter(|s| !s.is_trivial(n)).collect();
        assert_eq!(g, q, "sid {}", e.sentence.id);
    }
    let report = evaluate_parsed(&parsed, &gold, &EvalFilter::default()).unwrap();
    assert_eq!(report.mean_sf1, 1.0);
    assert_eq!(report.evaluated, 10);
}
