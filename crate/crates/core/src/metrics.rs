//! Centering metrics over a frame sequence and the comparator used to rank
//! orderings of the same discourse.

use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::centering::{CenteringFrame, Transition};
use crate::{Error, Result};

const EPS: f64 = 1e-12;

/// Transition counts, compared lexicographically by [`Metric::Tran`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct TranKey {
    pub cont: usize,
    pub ret: usize,
    pub sshift: usize,
    pub rshift: usize,
}

/// Satisfaction rates over the `t` transitions of one ordering. Higher is
/// more coherent everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Scorecard {
    pub t: usize,
    pub not_nocb: f64,
    pub cheap: f64,
    pub coherence: f64,
    pub salience: f64,
    pub kp: f64,
    pub tran: TranKey,
    pub nocb: usize,
}

impl Scorecard {
    pub fn value(&self, metric: Metric) -> Option<f64> {
        match metric {
            Metric::Nocb => Some(self.not_nocb),
            Metric::Cheap => Some(self.cheap),
            Metric::Coherence => Some(self.coherence),
            Metric::Salience => Some(self.salience),
            Metric::Kp => Some(self.kp),
            Metric::Tran => None,
        }
    }
}

/// Scores the transitions of `frames`. Every linked frame after the
/// initial one is a transition, NOCB frames included.
pub fn compute_scorecard(frames: &[CenteringFrame]) -> Result<Scorecard> {
    let mut linked = frames.iter().filter(|f| f.linked);
    let Some(mut prev) = linked.next() else {
        return Err(Error::NoTransitions);
    };
    let (mut t, mut has_cb, mut coherent, mut salient, mut cheap) = (0usize, 0usize, 0usize, 0usize, 0usize);
    let mut tran = TranKey::default();
    let mut nocb = 0;
    for cur in linked {
        t += 1;
        if let Some(cb) = cur.cb {
            has_cb += 1;
            coherent += usize::from(prev.cb == Some(cb));
            salient += usize::from(cur.cp == Some(cb));
            cheap += usize::from(prev.cp == Some(cb));
        }
        match cur.transition {
            Transition::Continue => tran.cont += 1,
            Transition::Retain => tran.ret += 1,
            Transition::SmoothShift => tran.sshift += 1,
            Transition::RoughShift => tran.rshift += 1,
            Transition::Nocb | Transition::Initial => nocb += 1,
        }
        prev = cur;
    }
    if t == 0 {
        return Err(Error::NoTransitions);
    }
    let rate = |n: usize| n as f64 / t as f64;
    let (not_nocb, coherence, salience, cheap) = (rate(has_cb), rate(coherent), rate(salient), rate(cheap));
    Ok(Scorecard {
        t,
        not_nocb,
        cheap,
        coherence,
        salience,
        kp: not_nocb + cheap + coherence + salience,
        tran,
        nocb,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Nocb,
    Cheap,
    Coherence,
    Salience,
    Kp,
    Tran,
}

impl Metric {
    pub const ALL: [Metric; 6] =
        [Metric::Nocb, Metric::Cheap, Metric::Coherence, Metric::Salience, Metric::Kp, Metric::Tran];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Nocb => "nocb",
            Metric::Cheap => "cheap",
            Metric::Coherence => "coherence",
            Metric::Salience => "salience",
            Metric::Kp => "kp",
            Metric::Tran => "tran",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Precondition(alloc::format!("unknown metric `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OrderingVerdict {
    ABetter,
    Equal,
    BBetter,
}

impl From<Ordering> for OrderingVerdict {
    fn from(o: Ordering) -> Self {
        match o {
            Ordering::Greater => OrderingVerdict::ABetter,
            Ordering::Equal => OrderingVerdict::Equal,
            Ordering::Less => OrderingVerdict::BBetter,
        }
    }
}

/// Which of two orderings of the same discourse is more coherent under
/// `metric`.
pub fn compare_orderings(metric: Metric, a: &Scorecard, b: &Scorecard) -> Result<OrderingVerdict> {
    if a.t != b.t {
        return Err(Error::TransitionCountMismatch { a: a.t, b: b.t });
    }
    let ord = match (a.value(metric), b.value(metric)) {
        (Some(x), Some(y)) => {
            if (x - y).abs() <= EPS {
                Ordering::Equal
            } else if x > y {
                Ordering::Greater
            } else {
                Ordering::Less
            }
        }
        _ => a
            .tran
            .cont
            .cmp(&b.tran.cont)
            .then(a.tran.ret.cmp(&b.tran.ret))
            .then(a.tran.sshift.cmp(&b.tran.sshift))
            .then(b.tran.rshift.cmp(&a.tran.rshift)),
    };
    Ok(ord.into())
}
