//! Document model: tokens, sentences, mention spans and coreference chains.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Coreference chain identifier, i.e. the entity a mention resolves to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EntityId(pub u64);

impl fmt::Display for EntityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grammatical {
    Subject,
    Object,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Semantic {
    Agent,
    Patient,
    Other,
}

/// The rank factors of a mention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RoleLabel {
    pub grammatical: Grammatical,
    pub is_pronoun: bool,
    pub semantic: Option<Semantic>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Token {
    /// 0-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub pos: String,
    /// Constituency fragment such as `(TOP(S(NP*`; `*` when unknown.
    pub parse_bit: String,
    pub speaker: String,
    /// (predicate index, argument label) for every predicate whose argument
    /// covers this token.
    pub srl_args: Vec<(usize, String)>,
    /// Grammatical role carried directly by the row (minimal format only).
    pub role_hint: Option<Grammatical>,
    /// Semantic role carried directly by the row (minimal format only).
    pub semantic_hint: Option<Semantic>,
    /// Columns kept verbatim for output (lemma, frameset, word sense,
    /// named entity).
    pub extra: Vec<String>,
}

impl Token {
    pub fn new(index: usize, surface: impl Into<String>, pos: impl Into<String>) -> Self {
        Token {
            index,
            surface: surface.into(),
            pos: pos.into(),
            parse_bit: String::from("*"),
            ..Token::default()
        }
    }
}

/// One labelled argument of one predicate, token range inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgSpan {
    pub predicate: usize,
    pub label: String,
    pub start: usize,
    pub end: usize,
}

impl ArgSpan {
    pub fn covers(&self, start: usize, end: usize) -> bool {
        self.start <= start && end <= self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Sentence {
    pub tokens: Vec<Token>,
    /// Predicate-argument spans; empty when the row had no SRL columns.
    pub args: Vec<ArgSpan>,
    /// Number of predicate columns the rows carried.
    pub predicates: usize,
}

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Self {
        Sentence { tokens, args: Vec::new(), predicates: 0 }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn has_srl(&self) -> bool {
        self.predicates > 0 || self.tokens.iter().any(|t| t.semantic_hint.is_some())
    }
}

/// A mention: an inclusive token range in one sentence plus its chain id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MentionSpan {
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
    pub chain: EntityId,
}

impl MentionSpan {
    pub fn new(sentence: usize, start: usize, end: usize, chain: u64) -> Self {
        MentionSpan { sentence, start, end, chain: EntityId(chain) }
    }

    /// Position key without the chain id.
    pub fn span(&self) -> (usize, usize, usize) {
        (self.sentence, self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub part: u32,
    pub sentences: Vec<Sentence>,
    /// Sorted by (sentence, start, end).
    pub mentions: Vec<MentionSpan>,
    pub chains: BTreeMap<EntityId, Vec<MentionSpan>>,
}

impl Document {
    /// Builds a document, validating spans and grouping mentions into chains.
    ///
    /// Exact duplicates collapse; the same span under two different chain ids
    /// is rejected.
    pub fn new(
        doc_id: impl Into<String>,
        part: u32,
        sentences: Vec<Sentence>,
        mentions: Vec<MentionSpan>,
    ) -> Result<Self> {
        let mut doc = Document {
            doc_id: doc_id.into(),
            part,
            sentences,
            mentions: Vec::new(),
            chains: BTreeMap::new(),
        };
        doc.set_mentions(mentions)?;
        Ok(doc)
    }

    /// The same text under a different clustering.
    pub fn with_mentions(&self, mentions: Vec<MentionSpan>) -> Result<Self> {
        let mut doc = Document {
            doc_id: self.doc_id.clone(),
            part: self.part,
            sentences: self.sentences.clone(),
            mentions: Vec::new(),
            chains: BTreeMap::new(),
        };
        doc.set_mentions(mentions)?;
        Ok(doc)
    }

    fn set_mentions(&mut self, mut mentions: Vec<MentionSpan>) -> Result<()> {
        for m in &mentions {
            self.check_mention(m)?;
        }
        mentions.sort();
        mentions.dedup();
        for pair in mentions.windows(2) {
            if pair[0].span() == pair[1].span() {
                return Err(Error::Precondition(alloc::format!(
                    "span {:?} carries chain ids {} and {}",
                    pair[0].span(),
                    pair[0].chain,
                    pair[1].chain
                )));
            }
        }
        let mut chains: BTreeMap<EntityId, Vec<MentionSpan>> = BTreeMap::new();
        for m in &mentions {
            chains.entry(m.chain).or_default().push(*m);
        }
        self.mentions = mentions;
        self.chains = chains;
        Ok(())
    }

    pub fn check_mention(&self, m: &MentionSpan) -> Result<()> {
        let ok = m.start <= m.end
            && self.sentences.get(m.sentence).is_some_and(|s| m.end < s.len());
        if ok {
            Ok(())
        } else {
            Err(Error::MentionOutsideDocument(*m))
        }
    }

    pub fn contains(&self, m: &MentionSpan) -> bool {
        self.mentions.binary_search(m).is_ok()
    }

    /// `doc_id:part`, used to key outputs.
    pub fn key(&self) -> String {
        alloc::format!("{}:{}", self.doc_id, self.part)
    }

    pub fn chain_size(&self, id: EntityId) -> usize {
        self.chains.get(&id).map_or(0, Vec::len)
    }

    pub fn token_count(&self) -> usize {
        self.sentences.iter().map(Sentence::len).sum()
    }

    pub fn has_srl(&self) -> bool {
        self.sentences.iter().any(Sentence::has_srl)
    }
}
