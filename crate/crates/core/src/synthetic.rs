//! Seeded synthetic discourses for tests, benchmarks and the bundled
//! fixture corpora.

use alloc::vec::Vec;
use alloc::format;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::centering::{Utterance, UtteranceMention};
use crate::model::{Document, EntityId, Grammatical, MentionSpan, RoleLabel, Semantic, Sentence, Token};

const NAMES: [&str; 16] = [
    "Alice", "Bruno", "Chloe", "Dmitri", "Esther", "Farid", "Greta", "Hugo", "Ines", "Jonas", "Keiko", "Lars",
    "Mira", "Nils", "Oona", "Pavel",
];
const NOUNS: [&str; 12] =
    ["report", "car", "letter", "garden", "contract", "painting", "piano", "ticket", "budget", "house", "camera", "map"];
const VERBS: [&str; 10] =
    ["visited", "called", "helped", "praised", "met", "thanked", "warned", "watched", "answered", "followed"];
const THING_VERBS: [&str; 8] = ["bought", "sold", "fixed", "read", "found", "signed", "moved", "painted"];
const TAILS: [[&str; 3]; 4] =
    [["in", "the", "morning"], ["at", "the", "station"], ["after", "the", "meeting"], ["near", "the", "river"]];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Kind {
    Person(usize),
    Thing(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Entity {
    id: u64,
    kind: Kind,
}

/// Builds one sentence "SUBJ VERB OBJ [PP] ." with role hints on the
/// head tokens.
struct SentenceBuilder {
    tokens: Vec<Token>,
    mentions: Vec<(usize, usize, u64)>,
}

impl SentenceBuilder {
    fn new() -> Self {
        SentenceBuilder { tokens: Vec::new(), mentions: Vec::new() }
    }

    fn push(&mut self, word: &str, pos: &str) -> usize {
        let i = self.tokens.len();
        self.tokens.push(Token::new(i, word, pos));
        i
    }

    fn noun_phrase(&mut self, e: Entity, pronoun: bool, g: Grammatical, s: Semantic) {
        let start = self.tokens.len();
        match (e.kind, pronoun) {
            (Kind::Person(n), false) => {
                self.push(NAMES[n % NAMES.len()], "NNP");
            }
            (Kind::Person(n), true) => {
                let p = match (n % 2, g) {
                    (0, Grammatical::Subject) => "she",
                    (0, _) => "her",
                    (_, Grammatical::Subject) => "he",
                    (_, _) => "him",
                };
                self.push(p, "PRP");
            }
            (Kind::Thing(_), true) => {
                self.push("it", "PRP");
            }
            (Kind::Thing(n), false) => {
                self.push("the", "DT");
                self.push(NOUNS[n % NOUNS.len()], "NN");
            }
        }
        let end = self.tokens.len() - 1;
        self.tokens[end].role_hint = Some(g);
        self.tokens[end].semantic_hint = Some(s);
        self.mentions.push((start, end, e.id));
    }

    fn clause(&mut self, subj: (Entity, bool), verb: &str, obj: (Entity, bool), tail: Option<usize>) {
        self.noun_phrase(subj.0, subj.1, Grammatical::Subject, Semantic::Agent);
        self.push(verb, "VBD");
        self.noun_phrase(obj.0, obj.1, Grammatical::Object, Semantic::Patient);
        if let Some(t) = tail {
            let [p, d, n] = TAILS[t % TAILS.len()];
            self.push(p, "IN");
            self.push(d, "DT");
            self.push(n, "NN");
        }
        self.push(".", ".");
    }

    fn finish(self, sentence: usize, out: &mut Vec<MentionSpan>) -> Sentence {
        out.extend(self.mentions.iter().map(|&(s, e, id)| MentionSpan::new(sentence, s, e, id)));
        Sentence::new(self.tokens)
    }
}

fn verb_for(obj: Entity, rng: &mut ChaCha8Rng) -> &'static str {
    match obj.kind {
        Kind::Person(_) => VERBS[rng.random_range(0..VERBS.len())],
        Kind::Thing(_) => THING_VERBS[rng.random_range(0..THING_VERBS.len())],
    }
}

fn tail(rng: &mut ChaCha8Rng) -> Option<usize> {
    rng.random_bool(0.4).then(|| rng.random_range(0..TAILS.len()))
}

/// One entity-coherent document: each sentence has the current focus as
/// subject and an object that usually becomes the next focus. A focus is
/// dropped once attention moves on, so only neighbouring sentences share
/// entities.
pub fn coherent_document(doc_id: &str, n_sentences: usize, rng: &mut ChaCha8Rng) -> Document {
    let mut next_id = 0u64;
    let mut person = rng.random_range(0..NAMES.len());
    let mut thing = rng.random_range(0..NOUNS.len());
    let mut new_entity = |rng: &mut ChaCha8Rng| {
        let kind = if rng.random_bool(0.7) {
            person += 1;
            Kind::Person(person)
        } else {
            thing += 1;
            Kind::Thing(thing)
        };
        next_id += 1;
        Entity { id: next_id - 1, kind }
    };
    let mut focus = new_entity(rng);
    let mut object = new_entity(rng);
    let mut object_uses = 0;
    let mut focus_named = false;
    let mut sentences = Vec::with_capacity(n_sentences);
    let mut mentions = Vec::new();
    for i in 0..n_sentences {
        if i > 0 {
            // the opening focus gets a second sentence before attention moves
            if i > 1 && rng.random_bool(0.6) {
                focus = object;
                focus_named = false;
                object = new_entity(rng);
                object_uses = 0;
            } else if object_uses >= 2 {
                object = new_entity(rng);
                object_uses = 0;
            }
        }
        let mut b = SentenceBuilder::new();
        let verb = verb_for(object, rng);
        b.clause((focus, focus_named), verb, (object, false), tail(rng));
        sentences.push(b.finish(i, &mut mentions));
        focus_named = true;
        object_uses += 1;
    }
    Document::new(doc_id, 0, sentences, mentions).expect("generated spans are valid")
}

/// A corpus of coherent documents of 4 to 8 sentences.
pub fn coherent_corpus(n_docs: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|i| {
            let n = rng.random_range(4..=8);
            coherent_document(&format!("synth_{i:03}"), n, &mut rng)
        })
        .collect()
}

/// A document built around lag-2 recurrence: even sentences have the
/// protagonist as subject; odd sentences have a one-off subject and, as
/// object, a side entity that comes back two sentences later. The
/// protagonist sometimes surfaces as the object of an odd sentence instead.
pub fn lag_document(doc_id: &str, n_sentences: usize, rng: &mut ChaCha8Rng) -> Document {
    let hero = Entity { id: 0, kind: Kind::Person(rng.random_range(0..NAMES.len())) };
    let mut next_id = 1u64;
    let mut person = rng.random_range(0..NAMES.len());
    let mut thing = rng.random_range(0..NOUNS.len());
    let mut fresh = |thing_like: bool| {
        next_id += 1;
        let kind = if thing_like {
            thing += 1;
            Kind::Thing(thing)
        } else {
            person += 1;
            Kind::Person(person)
        };
        Entity { id: next_id - 1, kind }
    };
    let mut sentences = Vec::with_capacity(n_sentences);
    let mut mentions = Vec::new();
    let mut side = fresh(true);
    let mut side_uses = 0;
    let mut hero_obj = fresh(true);
    let mut hero_obj_uses = 0;
    for i in 0..n_sentences {
        let mut b = SentenceBuilder::new();
        if i % 2 == 0 {
            if hero_obj_uses == 2 {
                hero_obj = fresh(true);
                hero_obj_uses = 0;
            }
            hero_obj_uses += 1;
            b.clause((hero, i > 0), verb_for(hero_obj, rng), (hero_obj, false), tail(rng));
        } else {
            let subj = fresh(false);
            let obj = if rng.random_bool(0.3) {
                hero
            } else {
                if side_uses == 2 {
                    side = fresh(true);
                    side_uses = 0;
                }
                side_uses += 1;
                side
            };
            b.clause((subj, false), verb_for(obj, rng), (obj, false), tail(rng));
        }
        sentences.push(b.finish(i, &mut mentions));
    }
    Document::new(doc_id, 0, sentences, mentions).expect("generated spans are valid")
}

/// A corpus of lag-2 documents of 6 to 10 sentences.
pub fn lag_corpus(n_docs: usize, seed: u64) -> Vec<Document> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_docs)
        .map(|i| {
            let n = rng.random_range(6..=10);
            lag_document(&format!("lag_{i:03}"), n, &mut rng)
        })
        .collect()
}

/// Reassigns each mention with probability `noise`: half of the time to
/// another chain of the document, otherwise to a fresh chain.
pub fn corrupt_mentions(mentions: &[MentionSpan], noise: f64, seed: u64) -> Vec<MentionSpan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ids: Vec<EntityId> = mentions.iter().map(|m| m.chain).collect();
    ids.sort();
    ids.dedup();
    let mut next = ids.last().map_or(0, |e| e.0 + 1);
    mentions
        .iter()
        .map(|m| {
            if !rng.random_bool(noise) {
                return *m;
            }
            let others: Vec<EntityId> = ids.iter().copied().filter(|&e| e != m.chain).collect();
            let chain = if !others.is_empty() && rng.random_bool(0.5) {
                others[rng.random_range(0..others.len())]
            } else {
                next += 1;
                EntityId(next - 1)
            };
            MentionSpan { chain, ..*m }
        })
        .collect()
}

/// A random discourse of utterances over a small entity pool, with random
/// roles, repeated mentions and ties. Some utterances may be empty.
pub fn random_discourse(seed: u64, max_utterances: usize, max_entities: u64) -> Vec<Utterance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=max_utterances.max(1));
    let grammatical = [Grammatical::Subject, Grammatical::Object, Grammatical::Other];
    let semantic = [Some(Semantic::Agent), Some(Semantic::Patient), Some(Semantic::Other), None];
    (0..n)
        .map(|u| {
            let k = rng.random_range(0..=4);
            let mut mentions: Vec<UtteranceMention> = (0..k)
                .map(|_| {
                    let start = rng.random_range(0..6);
                    UtteranceMention {
                        span: MentionSpan::new(u, start, start, rng.random_range(0..max_entities.max(1))),
                        role: RoleLabel {
                            grammatical: grammatical[rng.random_range(0..3)],
                            is_pronoun: rng.random_bool(0.3),
                            semantic: semantic[rng.random_range(0..4)],
                        },
                        chain_size: rng.random_range(1..=3),
                    }
                })
                .collect();
            mentions.sort_by_key(|m| (m.span.start, m.span.end, m.span.chain));
            mentions.dedup_by_key(|m| m.span);
            Utterance { ordinal: u, sentence: u, mentions }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coherent_corpus_is_reproducible() {
        let a = coherent_corpus(5, 3);
        let b = coherent_corpus(5, 3);
        assert_eq!(a, b);
        assert_ne!(a, coherent_corpus(5, 4));
        for d in &a {
            assert!((4..=8).contains(&d.sentences.len()));
            // only an object introduced in the last sentence can stay a singleton
            let last = d.sentences.len() - 1;
            assert!(d.chains.values().all(|c| c.len() >= 2 || c[0].sentence == last), "{}", d.doc_id);
        }
    }

    #[test]
    fn lag_documents_recur_at_lag_two() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = lag_document("x", 8, &mut rng);
        let hero: Vec<usize> = d.chains[&EntityId(0)].iter().map(|m| m.sentence).collect();
        for s in [0, 2, 4, 6] {
            assert!(hero.contains(&s));
        }
    }

    #[test]
    fn corruption_levels() {
        let d = &coherent_corpus(1, 0)[0];
        assert_eq!(corrupt_mentions(&d.mentions, 0.0, 1), d.mentions);
        let all = corrupt_mentions(&d.mentions, 1.0, 1);
        assert_eq!(all.len(), d.mentions.len());
        assert!(all.iter().zip(&d.mentions).all(|(a, b)| a.chain != b.chain && a.span() == b.span()));
        assert_eq!(corrupt_mentions(&d.mentions, 0.5, 9), corrupt_mentions(&d.mentions, 0.5, 9));
    }

    #[test]
    fn random_discourses_are_sorted() {
        for seed in 0..50 {
            for u in random_discourse(seed, 6, 4) {
                assert!(u.mentions.windows(2).all(|w| (w[0].span.start, w[0].span.end) <= (w[1].span.start, w[1].span.end)));
            }
        }
    }
}
