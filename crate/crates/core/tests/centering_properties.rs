mod common;

use centering_core::centering::UtteranceMention;
use centering_core::synthetic::random_discourse;
use centering_core::{
    backward_center, classify_transition, entity_weight, forward_centers, preferred_center, run_centering, Aggregator,
    EntityId, Grammatical, InstantiationConfig, MentionSpan, RoleLabel, Transition, Utterance, Weighting,
};
use common::{discourse, utt};
use proptest::prelude::*;

/// The transition table written out case by case.
fn table(prev_cb: Option<char>, cb: char, cp: char) -> Transition {
    let same_as_before = match prev_cb {
        None => true,
        Some(p) => p == cb,
    };
    match (same_as_before, cb == cp) {
        (true, true) => Transition::Continue,
        (true, false) => Transition::Retain,
        (false, true) => Transition::SmoothShift,
        (false, false) => Transition::RoughShift,
    }
}

#[test]
fn transition_table_is_total() {
    let id = |c: char| EntityId(c as u64);
    let mut seen = 0;
    for prev in [None, Some('X'), Some('Y')] {
        for cb in ['X', 'Y'] {
            for cp in ['X', 'Y'] {
                assert_eq!(classify_transition(prev.map(id), Some(id(cb)), Some(id(cp))), table(prev, cb, cp), "{prev:?} {cb} {cp}");
                seen += 1;
            }
            assert_eq!(classify_transition(prev.map(id), None, Some(id(cb))), Transition::Nocb);
        }
    }
    assert_eq!(seen, 12);
}

#[test]
fn documented_examples() {
    use Grammatical::*;
    // {A:3 at token 4, B:3 at token 1} -> B
    let u = utt(0, &[(0, Subject, false, 4), (1, Subject, false, 1)]);
    let cf = forward_centers(&u, &InstantiationConfig::default());
    assert_eq!(preferred_center(&cf), Some(EntityId(1)));
    // prev {A:3, B:3} with A first, cur {A:1, B:1} -> A
    let prev = forward_centers(&utt(0, &[(0, Subject, false, 0), (1, Subject, false, 3)]), &InstantiationConfig::default());
    let cur = forward_centers(&utt(1, &[(1, Other, false, 0), (0, Other, false, 2)]), &InstantiationConfig::default());
    assert_eq!(backward_center(&prev, &cur), Some(EntityId(0)));
    // [A, null, A] with skipping -> Continue
    let frames = run_centering(&discourse(&[&[0], &[], &[0]]), &InstantiationConfig::default());
    assert_eq!(frames.iter().map(|f| f.transition).collect::<Vec<_>>(), [Transition::Initial, Transition::Nocb, Transition::Continue]);
    assert!(!frames[1].linked);
    // the same without skipping breaks the chain
    let keep = InstantiationConfig { skip_null_utterances: false, ..InstantiationConfig::default() };
    let frames = run_centering(&discourse(&[&[0], &[], &[0]]), &keep);
    assert_eq!(frames[2].transition, Transition::Nocb);
}

fn configs() -> impl Strategy<Value = InstantiationConfig> {
    (any::<bool>(), any::<bool>(), any::<bool>(), any::<bool>()).prop_map(|(skip, single, sem, sum)| InstantiationConfig {
        skip_null_utterances: skip,
        cf_candidate: if single { centering_core::CfCandidate::IncludeSingleton } else { centering_core::CfCandidate::ClusterOnly },
        weighting: if sem { Weighting::SemanticRole } else { Weighting::GrammaticalRole },
        aggregator: if sum { Aggregator::Sum } else { Aggregator::Max },
        ..InstantiationConfig::default()
    })
}

fn frame_invariants(d: &[Utterance], config: &InstantiationConfig) -> Result<(), TestCaseError> {
    let frames = run_centering(d, config);
    prop_assert_eq!(frames.len(), d.len());
    let mut prev: Option<&centering_core::CenteringFrame> = None;
    let mut initial_seen = false;
    for f in &frames {
        prop_assert_eq!(f.cp.is_some(), !f.cf.is_empty());
        if let Some(cp) = f.cp {
            prop_assert!(f.cf.contains(cp));
        }
        if f.transition == Transition::Initial {
            prop_assert!(!initial_seen);
            initial_seen = true;
            prop_assert!(f.cb.is_none());
        } else if f.linked && prev.is_some() {
            prop_assert_eq!(f.transition == Transition::Nocb, f.cb.is_none());
        }
        if let Some(cb) = f.cb {
            let p = prev.expect("a backward center needs a linked predecessor");
            prop_assert!(f.cf.contains(cb) && p.cf.contains(cb));
        }
        if f.linked {
            prev = Some(f);
        }
    }
    Ok(())
}

proptest! {
    #[test]
    fn frames_are_well_formed(seed in any::<u64>(), config in configs()) {
        frame_invariants(&random_discourse(seed, 8, 5), &config)?;
    }

    #[test]
    fn weight_scale_invariance(seed in any::<u64>(), factor in 0.001f64..1000.0, config in configs()) {
        let d = random_discourse(seed, 8, 5);
        let cfs: Vec<_> = d.iter().map(|u| forward_centers(u, &config)).collect();
        let scaled: Vec<_> = cfs.iter().map(|c| c.scaled(factor)).collect();
        let cp = |cs: &[centering_core::ForwardCenters]| cs.iter().map(preferred_center).collect::<Vec<_>>();
        prop_assert_eq!(cp(&cfs), cp(&scaled));
        let cb = |cs: &[centering_core::ForwardCenters]| cs.windows(2).map(|w| backward_center(&w[0], &w[1])).collect::<Vec<_>>();
        prop_assert_eq!(cb(&cfs), cb(&scaled));
    }

    #[test]
    fn aggregator_monotonicity(seed in any::<u64>(), start in 0usize..6, g in 0usize..3, pronoun in any::<bool>()) {
        let d = random_discourse(seed, 4, 3);
        let roles = [Grammatical::Subject, Grammatical::Object, Grammatical::Other];
        for u in d.iter().filter(|u| !u.mentions.is_empty()) {
            let e = u.mentions[0].span.chain;
            let mut grown = u.clone();
            let extra = MentionSpan::new(u.sentence, 10 + start, 10 + start, e.0);
            grown.mentions.push(UtteranceMention {
                span: extra,
                role: RoleLabel { grammatical: roles[g], is_pronoun: pronoun, semantic: None },
                chain_size: 2,
            });
            for w in [Weighting::GrammaticalRole, Weighting::SemanticRole] {
                for a in [Aggregator::Max, Aggregator::Sum] {
                    prop_assert!(entity_weight(&grown, e, w, a).unwrap() >= entity_weight(u, e, w, a).unwrap());
                }
            }
        }
    }
}

#[test]
fn missing_entity_is_an_error() {
    let u = utt(0, &[(0, Grammatical::Subject, false, 0)]);
    assert!(entity_weight(&u, EntityId(9), Weighting::GrammaticalRole, Aggregator::Max).is_err());
}
