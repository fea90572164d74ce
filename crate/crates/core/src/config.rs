//! The parameter bundle that fixes one centering instantiation.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtteranceUnit {
    #[default]
    Sentence,
}

/// Which entities may enter the forward centers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CfCandidate {
    /// Only entities whose chain has at least two mentions in the document.
    #[default]
    ClusterOnly,
    IncludeSingleton,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    #[default]
    GrammaticalRole,
    SemanticRole,
}

/// How mention weights lift to an entity weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aggregator {
    #[default]
    Max,
    Sum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstantiationConfig {
    pub utterance_unit: UtteranceUnit,
    /// Skip utterances with empty forward centers when linking to the
    /// previous utterance.
    pub skip_null_utterances: bool,
    pub cf_candidate: CfCandidate,
    pub weighting: Weighting,
    pub aggregator: Aggregator,
    pub rng_seed: u64,
}

impl Default for InstantiationConfig {
    fn default() -> Self {
        InstantiationConfig {
            utterance_unit: UtteranceUnit::Sentence,
            skip_null_utterances: true,
            cf_candidate: CfCandidate::ClusterOnly,
            weighting: Weighting::GrammaticalRole,
            aggregator: Aggregator::Max,
            rng_seed: 42,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_field_names_and_defaults() {
        let json = serde_json::to_value(InstantiationConfig::default()).unwrap();
        assert_eq!(
            json,
            serde_json::json!({
                "utterance_unit": "sentence",
                "skip_null_utterances": true,
                "cf_candidate": "cluster_only",
                "weighting": "grammatical_role",
                "aggregator": "max",
                "rng_seed": 42
            })
        );
        let partial: InstantiationConfig =
            serde_json::from_str(r#"{"aggregator": "sum", "cf_candidate": "include_singleton"}"#).unwrap();
        assert_eq!(partial.aggregator, Aggregator::Sum);
        assert_eq!(partial.cf_candidate, CfCandidate::IncludeSingleton);
        assert!(partial.skip_null_utterances);
        assert_eq!(partial.rng_seed, 42);
    }
}
