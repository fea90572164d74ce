//! Recency-weighted backward centers.
//!
//! Instead of a single backward center drawn from the previous utterance,
//! a weighted set of centers is carried through the discourse as a left
//! fold: each step decays the old accessibility weights with a forget
//! function and adds the previous utterance's forward-center weights,
//! filtered by a gate. With a zero forget function and the membership gate
//! the argmax of the set is exactly the classic backward center.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::centering::{link_frames, forward_centers, CenteringFrame, ForwardCenters, Utterance};
use crate::config::InstantiationConfig;
use crate::metrics::compute_scorecard;
use crate::model::{Document, EntityId, MentionSpan};
use crate::stats::{mutual_information, pearson};
use crate::{utterances_of, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semiring {
    /// (R, +, x, 0, 1)
    #[default]
    RealPlusTimes,
}

impl Semiring {
    pub fn zero(self) -> f64 {
        0.0
    }

    pub fn one(self) -> f64 {
        1.0
    }

    pub fn add(self, a: f64, b: f64) -> f64 {
        a + b
    }

    pub fn mul(self, a: f64, b: f64) -> f64 {
        a * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Forget {
    Zero,
    /// `gamma * x`
    ExponentialDecay { gamma: f64 },
    /// `x * sigmoid(a * x + b)`: a one-unit feed-forward retention gate.
    Affine { a: f64, b: f64 },
}

impl Forget {
    pub fn apply(&self, x: f64) -> f64 {
        match *self {
            Forget::Zero => 0.0,
            Forget::ExponentialDecay { gamma } => gamma * x,
            Forget::Affine { a, b } => x / (1.0 + libm::exp(-(a * x + b))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    One,
    /// 1 when the entity is realized in both utterances, else 0.
    MembershipIndicator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecencyConfig {
    pub semiring: Semiring,
    pub forget: Forget,
    pub gate: Gate,
}

impl Default for RecencyConfig {
    /// The configuration that reproduces classic centering.
    fn default() -> Self {
        RecencyConfig { semiring: Semiring::RealPlusTimes, forget: Forget::Zero, gate: Gate::MembershipIndicator }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accessibility {
    pub weight: f64,
    /// Update step at which the previous forward centers last fed this
    /// entry.
    pub refreshed: usize,
    /// Position of that contribution in its utterance.
    pub first: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightedCenterSet {
    pub entries: BTreeMap<EntityId, Accessibility>,
    pub step: usize,
}

impl WeightedCenterSet {
    pub fn weight(&self, e: EntityId) -> Option<f64> {
        self.entries.get(&e).map(|a| a.weight)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn update_center_set(
    prev: &WeightedCenterSet,
    prev_cf: &ForwardCenters,
    cur_cf: &ForwardCenters,
    rc: &RecencyConfig,
) -> Result<WeightedCenterSet> {
    let w = rc.semiring;
    let step = prev.step + 1;
    let mut entries = BTreeMap::new();
    for (&e, acc) in &prev.entries {
        entries.insert(e, Accessibility { weight: rc.forget.apply(acc.weight), ..*acc });
    }
    for (e, c) in prev_cf.iter() {
        let gate = match rc.gate {
            Gate::One => w.one(),
            Gate::MembershipIndicator if cur_cf.contains(e) => w.one(),
            Gate::MembershipIndicator => w.zero(),
        };
        let fresh = w.mul(gate, c.weight);
        let entry = entries.entry(e).or_insert(Accessibility { weight: w.zero(), refreshed: step, first: c.first });
        entry.weight = w.add(entry.weight, fresh);
        entry.refreshed = step;
        entry.first = c.first;
    }
    for (&e, acc) in &entries {
        if !acc.weight.is_finite() || acc.weight < 0.0 {
            return Err(Error::InvalidWeight { entity: e.0, weight: acc.weight });
        }
    }
    Ok(WeightedCenterSet { entries, step })
}

/// The most accessible entity. Ties go to the most recently refreshed
/// entry, then the earlier position, then the smaller id.
pub fn backward_center_recency(set: &WeightedCenterSet) -> Option<EntityId> {
    let mut best: Option<(EntityId, &Accessibility)> = None;
    for (&e, a) in &set.entries {
        if a.weight <= 0.0 {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => {
                a.weight > b.weight
                    || (a.weight == b.weight
                        && (a.refreshed > b.refreshed || (a.refreshed == b.refreshed && a.first < b.first)))
            }
        };
        if better {
            best = Some((e, a));
        }
    }
    best.map(|(e, _)| e)
}

/// Centering frames with the recency backward center substituted. The
/// preferred center stays utterance-local.
pub fn run_recency_centering(
    discourse: &[Utterance],
    config: &InstantiationConfig,
    rc: &RecencyConfig,
) -> Result<Vec<CenteringFrame>> {
    let cfs = discourse.iter().map(|u| (u.sentence, forward_centers(u, config))).collect();
    let mut set = WeightedCenterSet::default();
    let mut failure = None;
    let frames = link_frames(cfs, config.skip_null_utterances, |prev, cur| {
        match update_center_set(&set, prev, cur, rc) {
            Ok(next) => set = next,
            Err(e) => {
                failure.get_or_insert(e);
            }
        }
        backward_center_recency(&set)
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(frames),
    }
}

/// Mean KP over the discourses that have at least one transition.
pub fn mean_recency_kp(
    corpus: &[Vec<Utterance>],
    config: &InstantiationConfig,
    rc: &RecencyConfig,
) -> Result<Option<f64>> {
    let mut total = 0.0;
    let mut n = 0usize;
    for d in corpus {
        match compute_scorecard(&run_recency_centering(d, config, rc)?) {
            Ok(card) => {
                total += card.kp;
                n += 1;
            }
            Err(Error::NoTransitions) => {}
            Err(e) => return Err(e),
        }
    }
    Ok((n > 0).then(|| total / n as f64))
}

/// Parameter grids searched by [`fit_forget`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitGrid {
    pub gammas: Vec<f64>,
    pub affine_a: Vec<f64>,
    pub affine_b: Vec<f64>,
}

fn steps(from: f64, to: f64, step: f64) -> Vec<f64> {
    let n = libm::round((to - from) / step) as usize;
    (0..=n).map(|i| from + (to - from) * i as f64 / n as f64).collect()
}

impl Default for FitGrid {
    fn default() -> Self {
        FitGrid { gammas: steps(0.0, 1.0, 0.05), affine_a: steps(-2.0, 2.0, 0.5), affine_b: steps(-4.0, 4.0, 1.0) }
    }
}

impl FitGrid {
    pub fn decay_only(gammas: Vec<f64>) -> Self {
        FitGrid { gammas, affine_a: Vec::new(), affine_b: Vec::new() }
    }

    fn candidates(&self) -> Vec<Forget> {
        let mut out: Vec<Forget> = self.gammas.iter().map(|&gamma| Forget::ExponentialDecay { gamma }).collect();
        for &a in &self.affine_a {
            for &b in &self.affine_b {
                out.push(Forget::Affine { a, b });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub forget: Forget,
    /// Corpus-mean KP per variant.
    pub scores: Vec<f64>,
    /// `None` when the score series is constant.
    pub pearson_r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub best: RecencyConfig,
    pub best_r: f64,
    pub best_mi: Option<f64>,
    /// The forget-free reference point (gamma = 0) under the same gate.
    pub baseline_r: Option<f64>,
    pub baseline_mi: Option<f64>,
    pub f1: Vec<f64>,
    pub grid: Vec<GridPoint>,
}

/// One clustering of the whole corpus (one mention list per document) and
/// its CoNLL F1.
#[derive(Debug, Clone, PartialEq)]
pub struct Variant {
    pub mentions: Vec<Vec<MentionSpan>>,
    pub conll_f1: f64,
}

/// Searches the forget grid for the parameters whose corpus-mean KP
/// correlates best with the variants' CoNLL F1. Semiring and gate come from
/// `base`. Ties keep the earlier grid point.
pub fn fit_forget(
    corpus: &[Document],
    variants: &[Variant],
    config: &InstantiationConfig,
    base: &RecencyConfig,
    grid: &FitGrid,
) -> Result<FitReport> {
    let mut distinct: Vec<f64> = variants.iter().map(|v| v.conll_f1).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if variants.len() < 3 || distinct.len() < 3 {
        return Err(Error::Precondition(alloc::format!(
            "fitting needs at least 3 variants with distinct F1 values, got {} ({} distinct)",
            variants.len(),
            distinct.len()
        )));
    }
    let f1: Vec<f64> = variants.iter().map(|v| v.conll_f1).collect();
    let discourses: Vec<Vec<Vec<Utterance>>> = variants
        .iter()
        .map(|v| {
            if v.mentions.len() != corpus.len() {
                return Err(Error::LengthMismatch(v.mentions.len(), corpus.len()));
            }
            corpus.iter().zip(&v.mentions).map(|(d, m)| utterances_of(d, m)).collect()
        })
        .collect::<Result<_>>()?;

    let evaluate = |forget: Forget| -> Result<GridPoint> {
        let rc = RecencyConfig { forget, ..*base };
        let mut scores = Vec::with_capacity(variants.len());
        for d in &discourses {
            scores.push(mean_recency_kp(d, config, &rc)?.ok_or(Error::NothingToScore { skipped: d.len() })?);
        }
        let pearson_r = match pearson(&scores, &f1) {
            Ok(r) => Some(r),
            Err(Error::ConstantSeries(_)) => None,
            Err(e) => return Err(e),
        };
        Ok(GridPoint { forget, scores, pearson_r })
    };

    let points = grid.candidates().into_iter().map(evaluate).collect::<Result<Vec<_>>>()?;
    let mut best: Option<&GridPoint> = None;
    for p in &points {
        if let Some(r) = p.pearson_r {
            if best.is_none_or(|b| r > b.pearson_r.unwrap_or(f64::NEG_INFINITY)) {
                best = Some(p);
            }
        }
    }
    let best = best.ok_or_else(|| Error::ConstantSeries(String::from("kp")))?;
    let baseline = evaluate(Forget::ExponentialDecay { gamma: 0.0 })?;
    let mi = |scores: &[f64]| mutual_information(scores, &f1, None).ok();
    Ok(FitReport {
        best: RecencyConfig { forget: best.forget, ..*base },
        best_r: best.pearson_r.unwrap_or_default(),
        best_mi: mi(&best.scores),
        baseline_r: baseline.pearson_r,
        baseline_mi: mi(&baseline.scores),
        f1,
        grid: points.clone(),
    })
}
