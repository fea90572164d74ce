//! Centering-theory analysis over coreference-annotated discourses.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure
//! computation: the document model, role derivation from constituency
//! bits, forward/backward/preferred centers, transition labelling, the
//! centering metrics, permutation-based coherence scoring, the
//! recency-weighted backward-center extension, coreference scorers and
//! the statistics used to relate centering scores to coreference quality.
//! File formats, IO and the command line live in `centering-kit`.

#![no_std]
#![warn(clippy::std_instead_of_alloc)]
#![warn(clippy::std_instead_of_core)]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod assignment;
pub mod centering;
pub mod config;
pub mod coref_eval;
mod error;
pub mod metrics;
pub mod model;
pub mod permute;
pub mod recency;
pub mod roles;
pub mod stats;
pub mod synthetic;
mod tree;

pub use self::centering::{
    backward_center, classify_transition, entity_weight, forward_centers, mention_weight,
    preferred_center, run_centering, utterances_of, Center, CenteringFrame, ForwardCenters,
    Transition, Utterance,
};
pub use self::config::{Aggregator, CfCandidate, InstantiationConfig, UtteranceUnit, Weighting};
pub use self::error::Error;
pub use self::metrics::{compare_orderings, compute_scorecard, Metric, OrderingVerdict, Scorecard};
pub use self::model::{
    ArgSpan, Document, EntityId, Grammatical, MentionSpan, RoleLabel, Semantic, Sentence, Token,
};
pub use self::permute::{
    coherence_score, corpus_coherence, permutations_of, CoherenceResult, CorpusCoherence,
    PermutationMode, PermutationPlan,
};
pub use self::recency::{
    backward_center_recency, fit_forget, update_center_set, FitReport, Forget, Gate,
    RecencyConfig, Semiring, WeightedCenterSet,
};
pub use self::roles::{grammatical_role, semantic_role};

pub type Result<T, E = Error> = core::result::Result<T, E>;
