//! Sequence matchers for fuzzy span-overlap scoring. Inputs are already
//! normalized (stemmed) token sequences.

use std::collections::HashMap;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BleuParams {
    /// Highest n-gram order; capped at the reference length.
    pub max_order: usize,
}

impl Default for BleuParams {
    fn default() -> Self {
        BleuParams { max_order: 4 }
    }
}

/// Classic METEOR parameters: `F = PR / (alpha P + (1 - alpha) R)` and
/// `penalty = gamma * (chunks / matches)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeteorParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// No fragmentation penalty when both sequences are matched entirely in
    /// a single chunk, so identical sequences score 1.
    pub perfect_match_exemption: bool,
}

impl Default for MeteorParams {
    fn default() -> Self {
        MeteorParams { alpha: 0.9, beta: 3.0, gamma: 0.5, perfect_match_exemption: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MatchScorer {
    /// Indicator of token-sequence equality.
    Exact,
    Bleu(BleuParams),
    Meteor(MeteorParams),
}

impl MatchScorer {
    pub fn score(&self, a: &[String], b: &[String]) -> f64 {
        match self {
            MatchScorer::Exact => f64::from(u8::from(a == b)),
            MatchScorer::Bleu(p) => bleu_match(a, b, p),
            MatchScorer::Meteor(p) => meteor_match(a, b, p),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            MatchScorer::Exact => "exact",
            MatchScorer::Bleu(_) => "bleu",
            MatchScorer::Meteor(_) => "meteor",
        }
    }
}

fn ngram_counts(tokens: &[String], order: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= order {
        for g in tokens.windows(order) {
            *counts.entry(g).or_insert(0) += 1;
        }
    }
    counts
}

/// Sentence BLEU of candidate `b` against reference `a`: geometric mean of
/// clipped n-gram precisions for orders `1..=min(max_order, |a|)`, add-one
/// smoothing on orders above 1, times the brevity penalty. In `[0, 1]`.
pub fn bleu_match(a: &[String], b: &[String], params: &BleuParams) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let orders = params.max_order.min(a.len()).max(1);
    let mut log_sum = 0.0;
    for order in 1..=orders {
        let reference = ngram_counts(a, order);
        let candidate = ngram_counts(b, order);
        let clipped: usize = candidate.iter().map(|(g, c)| (*c).min(reference.get(g).copied().unwrap_or(0))).sum();
        let total = (b.len() + 1).saturating_sub(order);
        let precision = if order == 1 {
            if total == 0 { 0.0 } else { clipped as f64 / total as f64 }
        } else {
            (clipped + 1) as f64 / (total + 1) as f64
        };
        if precision == 0.0 {
            return 0.0;
        }
        log_sum += precision.ln();
    }
    let (c, r) = (b.len() as f64, a.len() as f64);
    let brevity = if c >= r { 1.0 } else { (1.0 - r / c).exp() };
    (brevity * (log_sum / orders as f64).exp()).clamp(0.0, 1.0)
}

/// Node budget for the exact chunk search; beyond it the best alignment
/// found so far is used.
const SEARCH_BUDGET: usize = 200_000;

/// Unigram alignment between `a` and `b`: the number of matched pairs (as
/// large as possible) and the number of chunks (as few as possible among
/// maximum alignments). A chunk is a run of matches contiguous in both.
pub fn meteor_alignment(a: &[String], b: &[String]) -> (usize, usize) {
    let mut positions: HashMap<&str, Vec<usize>> = HashMap::new();
    for (k, t) in b.iter().enumerate() {
        positions.entry(t.as_str()).or_default().push(k);
    }
    let mut a_counts: HashMap<&str, usize> = HashMap::new();
    for t in a {
        *a_counts.entry(t.as_str()).or_insert(0) += 1;
    }
    let matches: usize = a_counts.iter().map(|(t, c)| (*c).min(positions.get(t).map_or(0, Vec::len))).sum();
    if matches == 0 {
        return (0, 0);
    }
    let skips: HashMap<&str, usize> =
        a_counts.iter().map(|(t, c)| (*t, c - (*c).min(positions.get(t).map_or(0, Vec::len)))).collect();

    let mut search = ChunkSearch {
        a,
        positions: &positions,
        used: vec![false; b.len()],
        skips,
        best: usize::MAX,
        nodes: 0,
    };
    search.dfs(0, None, 0);
    (matches, search.best)
}

struct ChunkSearch<'a> {
    a: &'a [String],
    positions: &'a HashMap<&'a str, Vec<usize>>,
    used: Vec<bool>,
    skips: HashMap<&'a str, usize>,
    best: usize,
    nodes: usize,
}

impl<'a> ChunkSearch<'a> {
    fn dfs(&mut self, i: usize, prev: Option<usize>, chunks: usize) {
        if chunks >= self.best {
            return;
        }
        if i == self.a.len() {
            self.best = chunks;
            return;
        }
        self.nodes += 1;
        if self.nodes > SEARCH_BUDGET && self.best != usize::MAX {
            return;
        }
        let tok = self.a[i].as_str();
        let continuing = prev.map(|p| p + 1);
        let mut candidates: Vec<usize> = self
            .positions
            .get(tok)
            .map(|ps| ps.iter().copied().filter(|&k| !self.used[k]).collect())
            .unwrap_or_default();
        // Try extending the current chunk first so a good bound is found early.
        candidates.sort_by_key(|&k| (Some(k) != continuing, k));
        for k in candidates {
            self.used[k] = true;
            let extra = usize::from(Some(k) != continuing);
            self.dfs(i + 1, Some(k), chunks + extra);
            self.used[k] = false;
        }
        let budget = self.skips.get(tok).copied().unwrap_or(0);
        if budget > 0 {
            self.skips.insert(tok, budget - 1);
            self.dfs(i + 1, None, chunks);
            self.skips.insert(tok, budget);
        }
    }
}

/// METEOR between reference `a` and candidate `b` on exact (stemmed) unigram
/// matches. Zero matches score 0.
pub fn meteor_match(a: &[String], b: &[String], params: &MeteorParams) -> f64 {
    let (matches, chunks) = meteor_alignment(a, b);
    if matches == 0 {
        return 0.0;
    }
    let m = matches as f64;
    let precision = m / b.len() as f64;
    let recall = m / a.len() as f64;
    let f_mean = precision * recall / (params.alpha * precision + (1.0 - params.alpha) * recall);
    let perfect = chunks == 1 && matches == a.len() && matches == b.len();
    let penalty = if params.perfect_match_exemption && perfect {
        0.0
    } else {
        params.gamma * (chunks as f64 / m).powf(params.beta)
    };
    (f_mean * (1.0 - penalty)).clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    /// Every injective partial map from `a` to equal tokens of `b`; returns
    /// (max matches, min chunks among maximum maps).
    fn brute_force_alignment(a: &[String], b: &[String]) -> (usize, usize) {
        fn go(i: usize, a: &[String], b: &[String], used: &mut Vec<bool>, map: &mut Vec<Option<usize>>, best: &mut (usize, usize)) {
            if i == a.len() {
                let matches = map.iter().flatten().count();
                let mut chunks = 0;
                for k in 0..map.len() {
                    if let Some(p) = map[k] {
                        let continues = k > 0 && map[k - 1].is_some_and(|q| q + 1 == p);
                        if !continues {
                            chunks += 1;
                        }
                    }
                }
                if matches > best.0 || (matches == best.0 && chunks < best.1) {
                    *best = (matches, chunks);
                }
                return;
            }
            map.push(None);
            go(i + 1, a, b, used, map, best);
            map.pop();
            for k in 0..b.len() {
                if !used[k] && a[i] == b[k] {
                    used[k] = true;
                    map.push(Some(k));
                    go(i + 1, a, b, used, map, best);
                    map.pop();
                    used[k] = false;
                }
            }
        }
        let mut best = (0, 0);
        go(0, a, b, &mut vec![false; b.len()], &mut Vec::new(), &mut best);
        best
    }

    #[test]
    fn bleu_cases() {
        let p = BleuParams::default();
        assert_eq!(bleu_match(&t("a b c"), &t("a b c"), &p), 1.0);
        assert!((bleu_match(&t("x y"), &t("y x"), &p) - 0.5f64.sqrt()).abs() < 1e-12);
        assert_eq!(bleu_match(&t("a b"), &t("c d"), &p), 0.0);
        assert_eq!(bleu_match(&t("an apple"), &t("an orange"), &BleuParams { max_order: 1 }), 0.5);
    }

    #[test]
    fn bleu_brevity_penalty() {
        let p = BleuParams { max_order: 1 };
        // candidate of 1 token against a 2-token reference: exp(1 - 2/1)
        assert!((bleu_match(&t("a b"), &t("a"), &p) - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn meteor_identical() {
        let classic = MeteorParams { perfect_match_exemption: false, ..Default::default() };
        assert!((meteor_match(&t("a b"), &t("a b"), &classic) - 0.9375).abs() < 1e-12);
        assert_eq!(meteor_match(&t("a b"), &t("a b"), &MeteorParams::default()), 1.0);
        assert_eq!(meteor_match(&t("a"), &t("a"), &MeteorParams::default()), 1.0);
    }

    #[test]
    fn meteor_zero_overlap() {
        assert_eq!(meteor_match(&t("a b"), &t("c d"), &MeteorParams::default()), 0.0);
    }

    #[test]
    fn meteor_give_john_a_book() {
        let a = t("give john a book");
        let b = t("give a book to john");
        assert_eq!(meteor_alignment(&a, &b), brute_force_alignment(&a, &b));
        assert_eq!(meteor_alignment(&a, &b), (4, 3));
        let p = MeteorParams::default();
        let (pr, rc) = (4.0 / 5.0, 1.0);
        let f = pr * rc / (0.9 * pr + 0.1 * rc);
        let expected = f * (1.0 - 0.5 * (3.0f64 / 4.0).powi(3));
        assert!((meteor_match(&a, &b, &p) - expected).abs() < 1e-12);
    }

    #[test]
    fn alignment_matches_brute_force_on_small_inputs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let vocab = ["a", "b", "c"];
        for _ in 0..2000 {
            let la = rng.gen_range(1..=6);
            let lb = rng.gen_range(1..=6);
            let a: Vec<String> = (0..la).map(|_| vocab[rng.gen_range(0..3)].to_string()).collect();
            let b: Vec<String> = (0..lb).map(|_| vocab[rng.gen_range(0..3)].to_string()).collect();
            assert_eq!(meteor_alignment(&a, &b), brute_force_alignment(&a, &b), "{a:?} {b:?}");
        }
    }

    #[test]
    fn scores_in_unit_interval() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let scorers = [MatchScorer::Exact, MatchScorer::Bleu(BleuParams::default()), MatchScorer::Meteor(MeteorParams::default())];
        for _ in 0..500 {
            let len = rng.gen_range(1..=7);
            let a: Vec<String> = (0..len).map(|_| rng.gen_range(0..4).to_string()).collect();
            let b: Vec<String> = (0..len).map(|_| rng.gen_range(0..4).to_string()).collect();
            for s in &scorers {
                let v = s.score(&a, &b);
                assert!((0.0..=1.0).contains(&v));
                assert_eq!(s.score(&a, &a), 1.0);
            }
        }
    }

    #[test]
    fn long_repetitive_inputs_finish() {
        let a: Vec<String> = (0..40).map(|k| ["the", "a"][k % 2].to_string()).collect();
        let b: Vec<String> = (0..40).map(|k| ["a", "the"][k % 3 % 2].to_string()).collect();
        let (m, c) = meteor_alignment(&a, &b);
        assert!(m > 0 && c >= 1 && c <= m);
    }
}
