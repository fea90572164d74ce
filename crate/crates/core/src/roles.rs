//! Grammatical and semantic role labels for mentions.
//!
//! Grammatical roles come from the constituency bits of the sentence (or a
//! role tag carried by the row in the minimal format); semantic roles come
//! from predicate-argument spans.

use alloc::vec::Vec;

use crate::model::{Document, Grammatical, MentionSpan, RoleLabel, Semantic, Sentence};
use crate::tree::Tree;
use crate::Result;

pub const PRONOUN_TAGS: [&str; 4] = ["PRP", "PRP$", "WP", "WP$"];

const CLAUSES: [&str; 4] = ["S", "SINV", "SQ", "SBAR"];

pub fn is_pronoun_tag(pos: &str) -> bool {
    PRONOUN_TAGS.contains(&pos)
}

/// Role label of `mention`. The head is the last token of the span.
pub fn grammatical_role(document: &Document, mention: &MentionSpan) -> Result<RoleLabel> {
    document.check_mention(mention)?;
    let sentence = &document.sentences[mention.sentence];
    let tree = sentence_tree(sentence);
    Ok(label_with_tree(sentence, tree.as_ref(), mention))
}

/// Labels every mention of one sentence, building the tree once.
pub(crate) fn label_sentence(
    sentence: &Sentence,
    mentions: &[MentionSpan],
) -> Vec<(MentionSpan, RoleLabel)> {
    let needs_tree = mentions.iter().any(|m| sentence.tokens[m.end].role_hint.is_none());
    let tree = if needs_tree { sentence_tree(sentence) } else { None };
    mentions
        .iter()
        .map(|m| (*m, label_with_tree(sentence, tree.as_ref(), m)))
        .collect()
}

fn sentence_tree(sentence: &Sentence) -> Option<Tree> {
    Tree::from_bits(sentence.tokens.iter().map(|t| (t.parse_bit.as_str(), t.pos.as_str())))
}

fn label_with_tree(sentence: &Sentence, tree: Option<&Tree>, mention: &MentionSpan) -> RoleLabel {
    let head = &sentence.tokens[mention.end];
    let grammatical = match head.role_hint {
        Some(g) => g,
        None => tree.map_or(Grammatical::Other, |t| slot_in_tree(t, mention.start, mention.end)),
    };
    RoleLabel {
        grammatical,
        is_pronoun: is_pronoun_tag(&head.pos),
        semantic: semantic_in_sentence(sentence, mention),
    }
}

fn slot_in_tree(tree: &Tree, start: usize, end: usize) -> Grammatical {
    let Some(mut np) = tree.smallest_covering(start, end, |n| !n.preterminal && n.label == "NP")
    else {
        return Grammatical::Other;
    };
    // The slot of a nested NP is that of its maximal NP projection.
    while let Some(p) = tree.nodes[np].parent {
        if tree.nodes[p].label != "NP" {
            break;
        }
        np = p;
    }
    let Some(parent) = tree.nodes[np].parent else {
        return Grammatical::Other;
    };
    let siblings = &tree.nodes[parent].children;
    let at = siblings.iter().position(|&c| c == np).unwrap_or(0);
    let parent_label = tree.nodes[parent].label.as_str();
    if CLAUSES.contains(&parent_label)
        && siblings[at + 1..].iter().any(|&c| tree.nodes[c].label == "VP")
    {
        return Grammatical::Subject;
    }
    if parent_label == "VP"
        && siblings[..at]
            .iter()
            .any(|&c| tree.nodes[c].preterminal && tree.nodes[c].label.starts_with("VB"))
    {
        return Grammatical::Object;
    }
    Grammatical::Other
}

/// Semantic role of `mention`, if the sentence carries argument spans
/// covering it.
pub fn semantic_role(document: &Document, mention: &MentionSpan) -> Option<Semantic> {
    document.check_mention(mention).ok()?;
    semantic_in_sentence(&document.sentences[mention.sentence], mention)
}

fn semantic_in_sentence(sentence: &Sentence, mention: &MentionSpan) -> Option<Semantic> {
    if let Some(s) = sentence.tokens[mention.end].semantic_hint {
        return Some(s);
    }
    let args = || sentence.args.iter().filter(|a| a.label != "V");
    let exact: Vec<_> = args().filter(|a| a.start == mention.start && a.end == mention.end).collect();
    let candidates = if exact.is_empty() {
        let min = args().filter(|a| a.covers(mention.start, mention.end)).map(|a| a.len()).min()?;
        args().filter(|a| a.covers(mention.start, mention.end) && a.len() == min).collect()
    } else {
        exact
    };
    if candidates.iter().any(|a| a.label == "ARG0") {
        Some(Semantic::Agent)
    } else if candidates.iter().any(|a| a.label == "ARG1") {
        Some(Semantic::Patient)
    } else {
        Some(Semantic::Other)
    }
}
