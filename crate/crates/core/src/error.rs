use alloc::string::String;

use crate::model::MentionSpan;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("mention {0:?} is not inside the document")]
    MentionOutsideDocument(MentionSpan),

    #[error("entity {0} is not realized in the utterance")]
    EntityNotInUtterance(u64),

    #[error("no transitions to score (the discourse has fewer than two linked utterances)")]
    NoTransitions,

    #[error("scorecards cover different transition counts ({a} vs {b})")]
    TransitionCountMismatch { a: usize, b: usize },

    #[error("need at least two utterances to permute, got {0}")]
    TooFewUtterances(usize),

    #[error("no scoreable discourse in corpus ({skipped} skipped)")]
    NothingToScore { skipped: usize },

    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("series `{name}` needs at least {min} samples, got {got}")]
    TooFewSamples { name: String, min: usize, got: usize },

    #[error("series `{0}` is constant")]
    ConstantSeries(String),

    #[error("number of bins must be at least 2, got {0}")]
    TooFewBins(usize),

    #[error("Fisher z comparison needs n > 3 (got {0})")]
    SampleTooSmall(usize),

    #[error("correlation {0} outside [-1, 1]")]
    InvalidCorrelation(f64),

    #[error("forget function produced an invalid weight {weight} for entity {entity}")]
    InvalidWeight { entity: u64, weight: f64 },

    #[error("{0}")]
    Precondition(String),
}
