#![allow(dead_code)]

use centering_core::centering::UtteranceMention;
use centering_core::{Grammatical, MentionSpan, RoleLabel, Utterance};

/// `(entity, role, pronoun, start token)`; every chain counts as non-singleton.
pub type M = (u64, Grammatical, bool, usize);

pub fn utt(ordinal: usize, mentions: &[M]) -> Utterance {
    let mut mentions: Vec<UtteranceMention> = mentions
        .iter()
        .map(|&(e, g, p, start)| UtteranceMention {
            span: MentionSpan::new(ordinal, start, start, e),
            role: RoleLabel { grammatical: g, is_pronoun: p, semantic: None },
            chain_size: 2,
        })
        .collect();
    mentions.sort_by_key(|m| (m.span.start, m.span.end));
    Utterance { ordinal, sentence: ordinal, mentions }
}

/// One subject mention per entity list entry, in order.
pub fn discourse(entities: &[&[u64]]) -> Vec<Utterance> {
    entities
        .iter()
        .enumerate()
        .map(|(i, es)| {
            let ms: Vec<M> = es
                .iter()
                .enumerate()
                .map(|(k, &e)| (e, if k == 0 { Grammatical::Subject } else { Grammatical::Object }, false, k * 2))
                .collect();
            utt(i, &ms)
        })
        .collect()
}
