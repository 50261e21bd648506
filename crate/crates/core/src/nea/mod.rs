//! Neural embedding allocation: embeddings trained by negative sampling on
//! `(parent, child)` pairs simulated from a topic model, and the smoothed
//! conditionals recovered from their dot products.

mod embedding;
mod engine;
mod general;
mod io;
mod lda;
mod neg;
mod skipgram;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use embedding::{doc_embeddings_from_assignments, softmax_rows, DocEmbeddings, EmbeddingSet};
pub use engine::LossLog;
pub use general::{train_nea_general, ChainSampler, GeneralEmbeddings, NeaGeneralOutput};
pub use io::{
    encode_doc_embeddings, encode_embeddings, encode_table, load_doc_embeddings, load_embeddings,
    load_table, save_doc_embeddings, save_embeddings, save_table, write_text_vectors, NamedMatrices,
    DOC_VECTORS_KIND, EMBEDDINGS_KIND, TABLE_KIND,
};
pub use lda::{
    doc_embeddings, sample_minibatch_lda, smooth_topics, train_nea_lda, LdaPairSampler,
    NeaLdaOutput,
};
pub use neg::{
    draw_negatives, neg_gradient, neg_objective, neg_update, neg_update_with, NegGradient,
    NoiseTable,
};
pub use skipgram::{sg_doc_features, train_skipgram, SkipGramOutput};

/// Negative-sampling training settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub dim: usize,
    pub minibatches: u64,
    pub batch_size: usize,
    /// Negative samples per positive pair.
    pub negatives: usize,
    pub learning_rate: f64,
    /// The learning rate decays linearly to this value over the run.
    pub learning_rate_floor: f64,
    /// Noise distribution is the output marginal raised to this power.
    /// `0` gives uniform noise, under which the softmax of the learned dot
    /// products reproduces the mimicked conditionals at the optimum.
    pub noise_exponent: f64,
    /// Redraw negatives that equal the positive output.
    pub reject_positive_negatives: bool,
    /// Minibatches per loss-log entry.
    pub log_interval: u64,
    /// `1` trains single-threaded and reproducibly; more workers update the
    /// shared parameters without locks and give up bit-reproducibility.
    pub workers: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            dim: 300,
            minibatches: 1_000_000,
            batch_size: 16,
            negatives: 5,
            learning_rate: 0.025,
            learning_rate_floor: 1e-4,
            noise_exponent: 0.0,
            reject_positive_negatives: false,
            log_interval: 1000,
            workers: 1,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::config("embedding dimension must be at least 1"));
        }
        if self.batch_size == 0 {
            return Err(Error::config("batch size must be at least 1"));
        }
        if self.negatives == 0 {
            return Err(Error::config("need at least one negative sample"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::config("learning rate must be positive"));
        }
        if !(self.learning_rate_floor >= 0.0 && self.learning_rate_floor <= self.learning_rate) {
            return Err(Error::config("learning-rate floor must lie in [0, learning rate]"));
        }
        if !(self.noise_exponent >= 0.0 && self.noise_exponent.is_finite()) {
            return Err(Error::config("noise exponent must be nonnegative"));
        }
        if self.log_interval == 0 {
            return Err(Error::config("log interval must be at least 1"));
        }
        if self.workers == 0 {
            return Err(Error::config("need at least one worker"));
        }
        Ok(())
    }

    /// Learning rate for minibatch `t` of the run.
    pub fn learning_rate_at(&self, t: u64) -> f64 {
        if self.minibatches == 0 {
            return self.learning_rate;
        }
        let progress = t as f64 / self.minibatches as f64;
        self.learning_rate + (self.learning_rate_floor - self.learning_rate) * progress
    }
}
