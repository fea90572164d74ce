//! Brute-force reference implementations shared by the test suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

/// Chains of mention indices.
pub type Chains = Vec<Vec<usize>>;

fn label_of(chains: &Chains) -> BTreeMap<usize, usize> {
    chains.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |&m| (m, i))).collect()
}

fn f1(p: f64, r: f64) -> f64 {
    if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    }
}

fn ratio(n: f64, d: f64) -> f64 {
    if d > 0.0 {
        n / d
    } else {
        0.0
    }
}

/// MUC recall from the links of `key` kept by `response`: each key chain
/// loses one link per extra connected component after dropping links
/// that cross response chains.
fn muc_recall(key: &Chains, response: &Chains) -> (f64, f64) {
    let label = label_of(response);
    let (mut num, mut den) = (0.0, 0.0);
    for c in key {
        let mut parent: Vec<usize> = (0..c.len()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                if label.contains_key(&c[i]) && label.get(&c[i]) == label.get(&c[j]) {
                    let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                    parent[a] = b;
                }
            }
        }
        let components = (0..c.len()).filter(|&i| find(&mut parent, i) == i).count();
        num += (c.len() - components) as f64;
        den += (c.len() - 1) as f64;
    }
    (num, den)
}

pub fn muc_oracle(gold: &Chains, pred: &Chains) -> (f64, f64, f64) {
    let (rn, rd) = muc_recall(gold, pred);
    let (pn, pd) = muc_recall(pred, gold);
    let (p, r) = (ratio(pn, pd), ratio(rn, rd));
    (p, r, f1(p, r))
}

/// Mention-by-mention B-cubed.
pub fn b3_oracle(gold: &Chains, pred: &Chains) -> (f64, f64, f64) {
    let side = |key: &Chains, response: &Chains| {
        let rl = label_of(response);
        let (mut num, mut den) = (0.0, 0.0);
        for c in key {
            for m in c {
                let same: BTreeSet<usize> = match rl.get(m) {
                    Some(&l) => response[l].iter().copied().collect(),
                    None => BTreeSet::new(),
                };
                num += c.iter().filter(|x| same.contains(x)).count() as f64 / c.len() as f64;
                den += 1.0;
            }
        }
        ratio(num, den)
    };
    let (p, r) = (side(pred, gold), side(gold, pred));
    (p, r, f1(p, r))
}

/// CEAF-phi4 by trying every injective matching of the smaller side.
pub fn ceaf_oracle(gold: &Chains, pred: &Chains) -> (f64, f64, f64) {
    fn phi(a: &[usize], b: &[usize]) -> f64 {
        2.0 * a.iter().filter(|x| b.contains(x)).count() as f64 / (a.len() + b.len()) as f64
    }
    fn best(gold: &Chains, pred: &Chains, i: usize, used: &mut Vec<bool>) -> f64 {
        if i == gold.len() {
            return 0.0;
        }
        let mut top = best(gold, pred, i + 1, used);
        for j in 0..pred.len() {
            if !used[j] {
                used[j] = true;
                top = top.max(phi(&gold[i], &pred[j]) + best(gold, pred, i + 1, used));
                used[j] = false;
            }
        }
        top
    }
    let total = best(gold, pred, 0, &mut vec![false; pred.len()]);
    let (p, r) = (ratio(total, pred.len() as f64), ratio(total, gold.len() as f64));
    (p, r, f1(p, r))
}

/// Two-sided p of the correlation t statistic by integrating the
/// unnormalized t density with Simpson's rule.
pub fn t_test_oracle(r: f64, n: usize) -> f64 {
    let nu = (n - 2) as f64;
    let t = r.abs() * nu.sqrt() / (1.0 - r * r).sqrt();
    let density = |x: f64| (1.0 + x * x / nu).powf(-(nu + 1.0) / 2.0);
    let simpson = |a: f64, b: f64, k: usize| {
        let h = (b - a) / k as f64;
        let inner: f64 = (1..k).map(|i| density(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 }).sum();
        (density(a) + density(b) + inner) * h / 3.0
    };
    let upper = 400.0;
    simpson(t, upper, 400_000) / simpson(0.0, upper, 400_000)
}

