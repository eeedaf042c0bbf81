use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sha2::{Digest, Sha256};
use spanoverlap::generate::mock::{chat_body, MockRequest, MockResponse, MockServer};
use spanoverlap::generate::read_records;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_spanoverlap"));
    c.env("SOURCE_DATE_EPOCH", "1700000000").env_remove("RUST_LOG").env_remove("SPANOVERLAP_API_KEY");
    c
}

fn ok(out: Output) -> String {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn reply(req: &MockRequest) -> MockResponse {
    let prompt = req.prompt().unwrap_or_default();
    let target = prompt.lines().last().unwrap_or_default().trim_end_matches(" .").to_string();
    MockResponse::ok(chat_body(&format!("1. {target}.\n2. Indeed {target}.")))
}

fn generate_online(server: &MockServer, store: &Path, families: &str) -> String {
    ok(bin()
        .env("SPANOVERLAP_API_KEY", "test-key")
        .args(["generate", "--families", families, "--base-url", &server.base_url(), "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .arg("--store")
        .arg(store)
        .output()
        .unwrap())
}

#[test]
fn help_exits_zero() {
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
    assert_eq!(bin().args(["parse", "--help"]).output().unwrap().status.code(), Some(0));
}

#[test]
fn unknown_flag_exits_one() {
    assert_eq!(bin().args(["parse", "--bogus"]).output().unwrap().status.code(), Some(1));
}

#[test]
fn bad_config_values_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .arg("--out-dir")
        .arg(dir.path())
        .args(["parse", "--scorer", "nope", "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "langauge = \"en\"\n").unwrap();
    assert_eq!(bin().arg("--config").arg(&cfg).args(["parse"]).output().unwrap().status.code(), Some(1));
}

#[test]
fn missing_store_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["parse", "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .arg("--store")
        .arg(dir.path().join("absent.jsonl"))
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn online_without_key_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["generate", "--base-url", "http://127.0.0.1:9", "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .arg("--store")
        .arg(dir.path().join("s.jsonl"))
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("SPANOVERLAP_API_KEY"));
}

#[test]
fn gold_against_itself_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let gold = fixtures().join("gold.mrg");
    let out = ok(bin().arg("--out-dir").arg(dir.path()).args(["evaluate", "--gold"]).arg(&gold).arg("--pred").arg(&gold).output().unwrap());
    assert_eq!(out.trim(), "SF1 1.0000 over 10 sentences (0 skipped)");
    let csv = std::fs::read_to_string(dir.path().join("eval_report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn rerun_makes_no_new_requests() {
    let server = MockServer::with_handler(reply);
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    let first = generate_online(&server, &store, "movement");
    assert!(first.contains("\"requested\":40"), "{first}");
    let n = server.request_count();
    let second = generate_online(&server, &store, "movement");
    assert_eq!(server.request_count(), n);
    assert!(second.contains("\"requested\":0"), "{second}");
    assert!(second.contains("\"skipped\":40"), "{second}");
}

#[test]
fn family_flag_limits_tags() {
    let server = MockServer::with_handler(reply);
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    generate_online(&server, &store, "movement");
    let records = read_records(&store).unwrap();
    assert!(!records.is_empty());
    assert!(records.iter().all(|r| r.instruction.starts_with("movement.")));
}

#[test]
fn mock_store_is_reproducible() {
    let server = MockServer::with_handler(reply);
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("s.jsonl");
    generate_online(&server, &store, "tense");
    let digest = hex(&Sha256::digest(std::fs::read(&store).unwrap()));
    assert_eq!(digest, GOLDEN_TENSE_STORE);
}

const GOLDEN_TENSE_STORE: &str = "51b1e310f0381de33079c0514dfebd025165cf1922c76106803a34dab26bd407";

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[test]
fn empty_store_gives_left_branching() {
    let dir = tempfile::tempdir().unwrap();
    let store = dir.path().join("empty.jsonl");
    std::fs::write(&store, "").unwrap();
    ok(bin().arg("--out-dir").arg(dir.path()).args(["parse", "--gold"]).arg(fixtures().join("gold.mrg")).arg("--store").arg(&store).output().unwrap());
    let preds = std::fs::read_to_string(dir.path().join("predictions.txt")).unwrap();
    let first = preds.lines().next().unwrap();
    assert_eq!(first, "(X (X (X John ate) an) apple)");
}

#[test]
fn fuzzy_scorer_changes_noisy_parse() {
    let dir = tempfile::tempdir().unwrap();
    let run = |scorer: &str| {
        let out = dir.path().join(scorer);
        ok(bin()
            .arg("--out-dir")
            .arg(&out)
            .args(["parse", "--scorer", scorer, "--model", "fixture-model", "--gold"])
            .arg(fixtures().join("noisy/gold.mrg"))
            .arg("--store")
            .arg(fixtures().join("noisy/paraphrases.jsonl"))
            .output()
            .unwrap());
        std::fs::read_to_string(out.join("predictions.txt")).unwrap()
    };
    assert_ne!(run("exact"), run("bleu"));
}

#[test]
fn ablate_writes_one_row_per_subset() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(bin()
        .arg("--config")
        .arg(fixtures().join("fixture.toml"))
        .arg("--out-dir")
        .arg(dir.path())
        .args(["ablate", "--subset", "movement", "--subset", "all", "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .arg("--store")
        .arg(fixtures().join("paraphrases.jsonl"))
        .output()
        .unwrap());
    assert_eq!(out, "movement\t0.8000\nall\t1.0000\n");
    let csv = std::fs::read_to_string(dir.path().join("ablation.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("families,mean_sf1,evaluated,fallback_sentences\n"));
}

#[test]
fn analyze_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = ok(bin()
        .arg("--config")
        .arg(fixtures().join("fixture.toml"))
        .arg("--out-dir")
        .arg(dir.path())
        .args(["analyze", "--min-occurrences", "0", "--gold"])
        .arg(fixtures().join("gold.mrg"))
        .arg("--store")
        .arg(fixtures().join("paraphrases.jsonl"))
        .output()
        .unwrap());
    let summary: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(summary["identification"].as_f64(), Some(1.0));
    assert!(summary["participant_mean"].as_f64().unwrap() > summary["event_mean"].as_f64().unwrap());
    for f in ["score_stats.csv", "identification.csv", "analysis_summary.json"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
}
