//! Coreference scorers: MUC, B-cubed, CEAF-phi4 and their CoNLL average.
//!
//! Each scorer returns raw numerators and denominators so that corpus
//! scores can be micro-averaged across documents before computing F1.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::assignment::max_weight_assignment;
use crate::model::MentionSpan;
use crate::{Error, Result};

/// Exact-span identity of a mention: (sentence, start, end).
pub type MentionKey = (usize, usize, usize);

/// A clustering of mentions into disjoint, non-empty chains.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ChainSet {
    chains: Vec<Vec<MentionKey>>,
}

impl ChainSet {
    pub fn new(chains: Vec<Vec<MentionKey>>) -> Result<Self> {
        let mut seen = BTreeMap::new();
        let mut out = Vec::with_capacity(chains.len());
        for (i, mut chain) in chains.into_iter().enumerate() {
            chain.sort();
            chain.dedup();
            if chain.is_empty() {
                return Err(Error::Precondition(alloc::format!("chain {i} is empty")));
            }
            for m in &chain {
                if let Some(j) = seen.insert(*m, i) {
                    return Err(Error::Precondition(alloc::format!("mention {m:?} is in chains {j} and {i}")));
                }
            }
            out.push(chain);
        }
        Ok(ChainSet { chains: out })
    }

    /// Groups mentions by chain id.
    pub fn from_mentions(mentions: &[MentionSpan]) -> Result<Self> {
        let mut by_chain: BTreeMap<u64, Vec<MentionKey>> = BTreeMap::new();
        for m in mentions {
            by_chain.entry(m.chain.0).or_default().push(m.span());
        }
        ChainSet::new(by_chain.into_values().collect())
    }

    pub fn chains(&self) -> &[Vec<MentionKey>] {
        &self.chains
    }

    pub fn len(&self) -> usize {
        self.chains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chains.is_empty()
    }

    fn index(&self) -> BTreeMap<MentionKey, usize> {
        self.chains.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |m| (*m, i))).collect()
    }
}

/// Precision, recall and F1.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Prf {
    pub p: f64,
    pub r: f64,
    pub f1: f64,
}

/// Raw counts behind a [`Prf`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrfCounts {
    pub p_num: f64,
    pub p_den: f64,
    pub r_num: f64,
    pub r_den: f64,
}

impl PrfCounts {
    pub fn prf(&self) -> Prf {
        let ratio = |n: f64, d: f64| if d > 0.0 { n / d } else { 0.0 };
        let p = ratio(self.p_num, self.p_den);
        let r = ratio(self.r_num, self.r_den);
        let f1 = if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
        Prf { p, r, f1 }
    }
}

impl core::ops::AddAssign for PrfCounts {
    fn add_assign(&mut self, o: Self) {
        self.p_num += o.p_num;
        self.p_den += o.p_den;
        self.r_num += o.r_num;
        self.r_den += o.r_den;
    }
}

/// Link-based MUC recall numerator and denominator of `key` against
/// `response`.
fn muc_side(key: &ChainSet, response: &ChainSet) -> (f64, f64) {
    let index = response.index();
    let (mut num, mut den) = (0usize, 0usize);
    for chain in key.chains() {
        let mut parts: Vec<Option<usize>> = chain.iter().map(|m| index.get(m).copied()).collect();
        let unaligned = parts.iter().filter(|p| p.is_none()).count();
        parts.retain(Option::is_some);
        parts.sort();
        parts.dedup();
        let partitions = parts.len() + unaligned;
        num += chain.len() - partitions;
        den += chain.len() - 1;
    }
    (num as f64, den as f64)
}

pub fn muc_counts(gold: &ChainSet, pred: &ChainSet) -> PrfCounts {
    let (r_num, r_den) = muc_side(gold, pred);
    let (p_num, p_den) = muc_side(pred, gold);
    PrfCounts { p_num, p_den, r_num, r_den }
}

pub fn muc(gold: &ChainSet, pred: &ChainSet) -> Prf {
    muc_counts(gold, pred).prf()
}

fn b_cubed_side(key: &ChainSet, response: &ChainSet) -> (f64, f64) {
    let index = response.index();
    let mut num = 0.0;
    let mut den = 0usize;
    for chain in key.chains() {
        let mut overlap: BTreeMap<usize, usize> = BTreeMap::new();
        for m in chain {
            if let Some(&j) = index.get(m) {
                *overlap.entry(j).or_default() += 1;
            }
        }
        // every mention of the chain inside response chain j shares the
        // same overlap count
        for &c in overlap.values() {
            num += (c * c) as f64 / chain.len() as f64;
        }
        den += chain.len();
    }
    (num, den as f64)
}

pub fn b_cubed_counts(gold: &ChainSet, pred: &ChainSet) -> PrfCounts {
    let (r_num, r_den) = b_cubed_side(gold, pred);
    let (p_num, p_den) = b_cubed_side(pred, gold);
    PrfCounts { p_num, p_den, r_num, r_den }
}

pub fn b_cubed(gold: &ChainSet, pred: &ChainSet) -> Prf {
    b_cubed_counts(gold, pred).prf()
}

fn phi4(a: &[MentionKey], b: &[MentionKey]) -> f64 {
    let common = a.iter().filter(|m| b.binary_search(m).is_ok()).count();
    2.0 * common as f64 / (a.len() + b.len()) as f64
}

pub fn ceaf_phi4_counts(gold: &ChainSet, pred: &ChainSet) -> PrfCounts {
    let (rows, cols) = (gold.len(), pred.len());
    let mut sim = Vec::with_capacity(rows * cols);
    for g in gold.chains() {
        for p in pred.chains() {
            sim.push(phi4(g, p));
        }
    }
    let (_, total) = max_weight_assignment(&sim, rows, cols);
    PrfCounts { p_num: total, p_den: cols as f64, r_num: total, r_den: rows as f64 }
}

pub fn ceaf_phi4(gold: &ChainSet, pred: &ChainSet) -> Prf {
    ceaf_phi4_counts(gold, pred).prf()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CorefCounts {
    pub muc: PrfCounts,
    pub b3: PrfCounts,
    pub ceaf4: PrfCounts,
}

impl CorefCounts {
    pub fn of(gold: &ChainSet, pred: &ChainSet) -> Self {
        CorefCounts { muc: muc_counts(gold, pred), b3: b_cubed_counts(gold, pred), ceaf4: ceaf_phi4_counts(gold, pred) }
    }

    pub fn conll_f1(&self) -> f64 {
        (self.muc.prf().f1 + self.b3.prf().f1 + self.ceaf4.prf().f1) / 3.0
    }
}

impl core::ops::AddAssign for CorefCounts {
    fn add_assign(&mut self, o: Self) {
        self.muc += o.muc;
        self.b3 += o.b3;
        self.ceaf4 += o.ceaf4;
    }
}

/// Unweighted mean of the MUC, B-cubed and CEAF-phi4 F1 scores.
pub fn conll_f1(gold: &ChainSet, pred: &ChainSet) -> f64 {
    CorefCounts::of(gold, pred).conll_f1()
}
