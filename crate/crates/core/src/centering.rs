//! Forward-looking centers, preferred and backward-looking centers, and
//! transition labels.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::config::{Aggregator, CfCandidate, InstantiationConfig, Weighting};
use crate::model::{Document, EntityId, Grammatical, MentionSpan, RoleLabel, Semantic};
use crate::roles::label_sentence;
use crate::{Error, Result};

/// A mention as seen from inside one utterance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtteranceMention {
    pub span: MentionSpan,
    pub role: RoleLabel,
    /// Document-wide size of the mention's chain.
    pub chain_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Utterance {
    pub ordinal: usize,
    pub sentence: usize,
    /// Sorted by (start, end).
    pub mentions: Vec<UtteranceMention>,
}

impl Utterance {
    /// Distinct entities realized in the utterance, in id order.
    pub fn entities(&self) -> Vec<EntityId> {
        let mut ids: Vec<EntityId> = self.mentions.iter().map(|m| m.span.chain).collect();
        ids.sort();
        ids.dedup();
        ids
    }
}

/// Splits a document into sentence utterances under the clustering
/// `mentions` (the mention-to-entity map), labelling every mention's role.
pub fn utterances_of(document: &Document, mentions: &[MentionSpan]) -> Result<Vec<Utterance>> {
    let mut by_sentence: Vec<Vec<MentionSpan>> = alloc::vec![Vec::new(); document.sentences.len()];
    let mut sizes: BTreeMap<EntityId, usize> = BTreeMap::new();
    for m in mentions {
        document.check_mention(m)?;
        by_sentence[m.sentence].push(*m);
        *sizes.entry(m.chain).or_default() += 1;
    }
    Ok(by_sentence
        .into_iter()
        .enumerate()
        .map(|(i, mut ms)| {
            ms.sort_by_key(|m| (m.start, m.end, m.chain));
            ms.dedup();
            let mentions = label_sentence(&document.sentences[i], &ms)
                .into_iter()
                .map(|(span, role)| UtteranceMention { span, role, chain_size: sizes[&span.chain] })
                .collect();
            Utterance { ordinal: i, sentence: i, mentions }
        })
        .collect())
}

/// Rank score of a mention: 5 for the top of the ordering down to 1.
pub fn mention_weight(role: &RoleLabel, weighting: Weighting) -> f64 {
    match weighting {
        Weighting::GrammaticalRole => match (role.is_pronoun, role.grammatical) {
            (true, Grammatical::Subject) => 5.0,
            (true, Grammatical::Object) => 4.0,
            (false, Grammatical::Subject) => 3.0,
            (false, Grammatical::Object) => 2.0,
            (_, Grammatical::Other) => 1.0,
        },
        Weighting::SemanticRole => match (role.is_pronoun, role.semantic) {
            (true, Some(Semantic::Agent)) => 5.0,
            (true, Some(Semantic::Patient)) => 4.0,
            (false, Some(Semantic::Agent)) => 3.0,
            (false, Some(Semantic::Patient)) => 2.0,
            _ => 1.0,
        },
    }
}

fn aggregate(weights: impl Iterator<Item = f64>, aggregator: Aggregator) -> Option<f64> {
    let mut acc: Option<f64> = None;
    for w in weights {
        acc = Some(match (acc, aggregator) {
            (None, _) => w,
            (Some(a), Aggregator::Max) => a.max(w),
            (Some(a), Aggregator::Sum) => a + w,
        });
    }
    acc
}

/// Lifts mention weights to `entity` by aggregating over its mentions in
/// the utterance.
pub fn entity_weight(
    utterance: &Utterance,
    entity: EntityId,
    weighting: Weighting,
    aggregator: Aggregator,
) -> Result<f64> {
    aggregate(
        utterance
            .mentions
            .iter()
            .filter(|m| m.span.chain == entity)
            .map(|m| mention_weight(&m.role, weighting)),
        aggregator,
    )
    .ok_or(Error::EntityNotInUtterance(entity.0))
}

/// Weight and position of one forward center.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Center {
    pub weight: f64,
    /// Start token of the entity's first mention in the utterance.
    pub first: usize,
}

/// Weighted forward-looking centers of one utterance.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ForwardCenters(pub BTreeMap<EntityId, Center>);

impl ForwardCenters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, entity: EntityId, weight: f64, first: usize) {
        self.0.insert(entity, Center { weight, first });
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, entity: EntityId) -> bool {
        self.0.contains_key(&entity)
    }

    pub fn get(&self, entity: EntityId) -> Option<&Center> {
        self.0.get(&entity)
    }

    pub fn weight(&self, entity: EntityId) -> Option<f64> {
        self.0.get(&entity).map(|c| c.weight)
    }

    pub fn iter(&self) -> impl Iterator<Item = (EntityId, &Center)> {
        self.0.iter().map(|(e, c)| (*e, c))
    }

    /// Highest weight first; ties go to the earlier first mention, then to
    /// the smaller id.
    fn best_of(&self, mut keep: impl FnMut(EntityId) -> bool) -> Option<EntityId> {
        let mut best: Option<(EntityId, &Center)> = None;
        for (e, c) in self.iter() {
            if !keep(e) {
                continue;
            }
            let better = match best {
                None => true,
                Some((_, b)) => c.weight > b.weight || (c.weight == b.weight && c.first < b.first),
            };
            if better {
                best = Some((e, c));
            }
        }
        best.map(|(e, _)| e)
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ForwardCenters(self.0.iter().map(|(e, c)| (*e, Center { weight: c.weight * factor, first: c.first })).collect())
    }
}

/// Forward centers of `utterance`: one entry per realized entity that
/// passes the candidate filter.
pub fn forward_centers(utterance: &Utterance, config: &InstantiationConfig) -> ForwardCenters {
    let mut cf = ForwardCenters::new();
    for m in &utterance.mentions {
        if config.cf_candidate == CfCandidate::ClusterOnly && m.chain_size < 2 {
            continue;
        }
        let w = mention_weight(&m.role, config.weighting);
        match cf.0.get_mut(&m.span.chain) {
            Some(c) => {
                c.weight = match config.aggregator {
                    Aggregator::Max => c.weight.max(w),
                    Aggregator::Sum => c.weight + w,
                };
                c.first = c.first.min(m.span.start);
            }
            None => cf.insert(m.span.chain, w, m.span.start),
        }
    }
    cf
}

pub fn preferred_center(cf: &ForwardCenters) -> Option<EntityId> {
    cf.best_of(|_| true)
}

/// The highest-weighted entity of the previous forward centers that is
/// also realized now. Weights and positions are the previous utterance's.
pub fn backward_center(prev: &ForwardCenters, cur: &ForwardCenters) -> Option<EntityId> {
    prev.best_of(|e| cur.contains(e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Transition {
    Continue,
    Retain,
    SmoothShift,
    RoughShift,
    Nocb,
    Initial,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Transition::Continue => "continue",
            Transition::Retain => "retain",
            Transition::SmoothShift => "smooth_shift",
            Transition::RoughShift => "rough_shift",
            Transition::Nocb => "nocb",
            Transition::Initial => "initial",
        })
    }
}

/// Transition label from the previous backward center and the current
/// backward and preferred centers. An undefined previous backward center
/// falls in the same column as an unchanged one.
pub fn classify_transition(
    prev_cb: Option<EntityId>,
    cb: Option<EntityId>,
    cp: Option<EntityId>,
) -> Transition {
    let Some(cb) = cb else {
        return Transition::Nocb;
    };
    let kept = prev_cb.is_none_or(|p| p == cb);
    match (kept, Some(cb) == cp) {
        (true, true) => Transition::Continue,
        (true, false) => Transition::Retain,
        (false, true) => Transition::SmoothShift,
        (false, false) => Transition::RoughShift,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenteringFrame {
    pub utterance_ordinal: usize,
    pub sentence: usize,
    pub cf: ForwardCenters,
    pub cp: Option<EntityId>,
    pub cb: Option<EntityId>,
    pub transition: Transition,
    /// Whether the frame takes part in previous-utterance linkage. Null
    /// utterances do not when they are skipped.
    pub linked: bool,
}

/// Centering frames for an ordered discourse.
pub fn run_centering(discourse: &[Utterance], config: &InstantiationConfig) -> Vec<CenteringFrame> {
    let cfs = discourse.iter().map(|u| (u.sentence, forward_centers(u, config))).collect();
    link_frames(cfs, config.skip_null_utterances, backward_center)
}

/// Links forward centers into frames, asking `backward` for each linked
/// frame's backward center given the previous linked frame's centers.
pub(crate) fn link_frames(
    cfs: Vec<(usize, ForwardCenters)>,
    skip_null: bool,
    mut backward: impl FnMut(&ForwardCenters, &ForwardCenters) -> Option<EntityId>,
) -> Vec<CenteringFrame> {
    let mut frames: Vec<CenteringFrame> = Vec::with_capacity(cfs.len());
    let mut prev: Option<usize> = None;
    for (ordinal, (sentence, cf)) in cfs.into_iter().enumerate() {
        let cp = preferred_center(&cf);
        let null = cf.is_empty();
        let frame = match prev {
            None if null => CenteringFrame { utterance_ordinal: ordinal, sentence, cf, cp, cb: None, transition: Transition::Nocb, linked: !skip_null },
            None => CenteringFrame { utterance_ordinal: ordinal, sentence, cf, cp, cb: None, transition: Transition::Initial, linked: true },
            Some(_) if null && skip_null => CenteringFrame { utterance_ordinal: ordinal, sentence, cf, cp, cb: None, transition: Transition::Nocb, linked: false },
            Some(p) => {
                let cb = backward(&frames[p].cf, &cf);
                let transition = classify_transition(frames[p].cb, cb, cp);
                CenteringFrame { utterance_ordinal: ordinal, sentence, cf, cp, cb, transition, linked: true }
            }
        };
        if frame.linked {
            prev = Some(ordinal);
        }
        frames.push(frame);
    }
    frames
}
