//! Evaluation: UMass coherence, symmetric-KL author retrieval and
//! logistic-regression document classification.

mod classify;
mod coherence;
mod harness;
mod ranking;

use serde::{Deserialize, Serialize};

pub use classify::{
    accuracy, classifier_loss, concat_features, train_classifier, Classifier, ClassifierConfig,
};
pub use coherence::{coherence_report, top_words, umass_coherence, CoherenceReport, DocIndex, TopicCoherence};
pub use harness::{
    classification_report, feature_blocks, ClassificationRow, FeatureKind, FeatureSpec, HarnessSettings,
};
pub use ranking::{
    author_paper_counts, author_tfidf, coauthor_mrr, coauthor_sets, eligible_authors, rank_by_distance,
    skl, QueryRank, RankingResult,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Top words per topic for coherence.
    pub top_words: usize,
    /// Authors need at least this many papers to be retrieval queries.
    pub min_papers: usize,
    pub classifier: ClassifierConfig,
    /// Fraction of documents in the classification training split.
    pub split_ratio: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            top_words: 10,
            min_papers: 5,
            classifier: ClassifierConfig::default(),
            split_ratio: 0.5,
        }
    }
}
