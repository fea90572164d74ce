//! Permutation-based coherence assessment.
//!
//! An ordering is scored against alternative orderings of the same
//! utterances: the coherence score is the share of alternatives that do
//! worse, counting ties as half, on a 0-100 scale.

use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::centering::{forward_centers, run_centering, Utterance};
use crate::config::InstantiationConfig;
use crate::metrics::{compare_orderings, compute_scorecard, Metric, OrderingVerdict, Scorecard};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PermutationMode {
    Exhaustive,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct PermutationPlan {
    pub sample_size: usize,
    /// Discourses longer than this many utterances are sampled.
    pub threshold: usize,
    pub seed: u64,
}

impl Default for PermutationPlan {
    fn default() -> Self {
        PermutationPlan { sample_size: 100, threshold: 5, seed: 42 }
    }
}

/// `n! - 1`, saturating.
fn alternatives(n: usize) -> u64 {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k)).map_or(u64::MAX, |f| f - 1)
}

impl PermutationPlan {
    pub fn mode_for(&self, n: usize) -> PermutationMode {
        if n <= self.threshold || self.sample_size as u64 >= alternatives(n) {
            PermutationMode::Exhaustive
        } else {
            PermutationMode::Sampled
        }
    }
}

/// Every ordering of `0..n` except the identity, in lexicographic order.
pub fn exhaustive_orderings(n: usize) -> Vec<Vec<usize>> {
    let mut cur: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = v.windows(2).rposition(|w| w[0] < w[1]) else {
        return false;
    };
    let j = v.iter().rposition(|&x| x > v[i]).unwrap_or(i);
    v.swap(i, j);
    v[i + 1..].reverse();
    true
}

/// `k` distinct non-identity orderings of `0..n` drawn by seeded shuffles,
/// rejecting repeats. Falls back to the exhaustive set when `k` covers it.
pub fn sampled_orderings(n: usize, k: usize, seed: u64) -> Vec<Vec<usize>> {
    if k as u64 >= alternatives(n) {
        return exhaustive_orderings(n);
    }
    let identity: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        let mut v = identity.clone();
        v.shuffle(&mut rng);
        if v != identity && seen.insert(v.clone()) {
            out.push(v);
        }
    }
    out
}

/// Candidate orderings for a discourse of `n` scoreable utterances.
pub fn permutations_of(n: usize, plan: &PermutationPlan) -> Result<Vec<Vec<usize>>> {
    if n < 2 {
        return Err(Error::TooFewUtterances(n));
    }
    Ok(match plan.mode_for(n) {
        PermutationMode::Exhaustive => exhaustive_orderings(n),
        PermutationMode::Sampled => sampled_orderings(n, plan.sample_size, plan.seed),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceResult {
    pub metric: Metric,
    /// Scoreable utterances that were permuted.
    pub n_utt: usize,
    pub worse: usize,
    pub equal: usize,
    pub better: usize,
    pub ch: f64,
}

impl CoherenceResult {
    fn from_counts(metric: Metric, n_utt: usize, worse: usize, equal: usize, better: usize) -> Self {
        let total = worse + equal + better;
        let ch = if total == 0 { 50.0 } else { 100.0 * (worse as f64 + equal as f64 / 2.0) / total as f64 };
        CoherenceResult { metric, n_utt, worse, equal, better, ch }
    }
}

/// The utterances that take part in permutation under `config`.
pub fn scoreable(discourse: &[Utterance], config: &InstantiationConfig) -> Vec<Utterance> {
    discourse
        .iter()
        .filter(|u| !config.skip_null_utterances || !forward_centers(u, config).is_empty())
        .cloned()
        .collect()
}

fn score_ordering(utterances: &[Utterance], order: &[usize], config: &InstantiationConfig) -> Result<Scorecard> {
    let reordered: Vec<Utterance> = order.iter().map(|&i| utterances[i].clone()).collect();
    compute_scorecard(&run_centering(&reordered, config))
}

/// Compares the given ordering against explicit candidate orderings.
pub fn coherence_against(
    utterances: &[Utterance],
    config: &InstantiationConfig,
    metric: Metric,
    candidates: &[Vec<usize>],
) -> Result<CoherenceResult> {
    let original = compute_scorecard(&run_centering(utterances, config))?;
    let (mut worse, mut equal, mut better) = (0, 0, 0);
    for order in candidates {
        let card = score_ordering(utterances, order, config)?;
        match compare_orderings(metric, &original, &card)? {
            OrderingVerdict::ABetter => worse += 1,
            OrderingVerdict::Equal => equal += 1,
            OrderingVerdict::BBetter => better += 1,
        }
    }
    Ok(CoherenceResult::from_counts(metric, utterances.len(), worse, equal, better))
}

/// Coherence score of one discourse under `metric`. The clustering carried
/// by the utterances stays fixed; only the utterance order changes.
pub fn coherence_score(
    discourse: &[Utterance],
    config: &InstantiationConfig,
    metric: Metric,
    plan: &PermutationPlan,
) -> Result<CoherenceResult> {
    let utterances = scoreable(discourse, config);
    let candidates = permutations_of(utterances.len(), plan)?;
    coherence_against(&utterances, config, metric, &candidates)
}

/// Scores every metric of `metrics` over the same candidate set.
pub fn coherence_scores(
    discourse: &[Utterance],
    config: &InstantiationConfig,
    metrics: &[Metric],
    plan: &PermutationPlan,
) -> Result<Vec<CoherenceResult>> {
    let utterances = scoreable(discourse, config);
    let candidates = permutations_of(utterances.len(), plan)?;
    let original = compute_scorecard(&run_centering(&utterances, config))?;
    let cards = candidates
        .iter()
        .map(|o| score_ordering(&utterances, o, config))
        .collect::<Result<Vec<_>>>()?;
    metrics
        .iter()
        .map(|&metric| {
            let (mut worse, mut equal, mut better) = (0, 0, 0);
            for card in &cards {
                match compare_orderings(metric, &original, card)? {
                    OrderingVerdict::ABetter => worse += 1,
                    OrderingVerdict::Equal => equal += 1,
                    OrderingVerdict::BBetter => better += 1,
                }
            }
            Ok(CoherenceResult::from_counts(metric, utterances.len(), worse, equal, better))
        })
        .collect()
}

/// Seed for the `index`-th discourse of a corpus.
pub fn discourse_seed(seed: u64, index: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((index as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusCoherence {
    pub metric: Metric,
    pub mean_ch: f64,
    pub scored: usize,
    pub skipped: usize,
    /// Per-discourse results; `None` for skipped discourses.
    pub results: Vec<Option<CoherenceResult>>,
}

/// Unweighted mean coherence over the scoreable discourses of a corpus.
pub fn corpus_coherence(
    corpus: &[Vec<Utterance>],
    config: &InstantiationConfig,
    metric: Metric,
    plan: &PermutationPlan,
) -> Result<CorpusCoherence> {
    let results: Vec<Option<CoherenceResult>> = corpus
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let plan = PermutationPlan { seed: discourse_seed(plan.seed, i), ..*plan };
            coherence_score(d, config, metric, &plan).ok()
        })
        .collect();
    summarize(metric, results)
}

pub fn summarize(metric: Metric, results: Vec<Option<CoherenceResult>>) -> Result<CorpusCoherence> {
    let scored: Vec<f64> = results.iter().flatten().map(|r| r.ch).collect();
    let skipped = results.len() - scored.len();
    if scored.is_empty() {
        return Err(Error::NothingToScore { skipped });
    }
    Ok(CorpusCoherence {
        metric,
        mean_ch: scored.iter().sum::<f64>() / scored.len() as f64,
        scored: scored.len(),
        skipped,
        results,
    })
}
