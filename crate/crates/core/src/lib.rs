//! Topic models and the embeddings that mimic them.
//!
//! The crate is organised by pipeline stage:
//!
//! - [`corpus`]: tokenization, vocabulary, tf-idf and train/test splits.
//! - [`topic_models`]: collapsed Gibbs samplers for LDA, the author-topic
//!   model and the mixed-membership skip-gram topic model, plus the
//!   closed-form skip-gram topic model estimate.
//! - [`nea`]: negative-sampling embeddings trained on pairs simulated from a
//!   topic model, softmax smoothing of the learned dot products, document
//!   vectors and a plain skip-gram baseline.
//! - [`eval`]: UMass coherence, author retrieval and logistic-regression
//!   document classification.
//!
//! Every trainer takes an explicit seed and is bit-for-bit reproducible in its
//! default single-threaded mode.

pub mod artifact;
pub mod config;
pub mod corpus;
pub mod error;
pub mod eval;
pub mod matrix;
pub mod nea;
pub mod sampling;
pub mod topic_models;

pub use corpus::{Corpus, Document, TfIdfMatrix, TokenizerConfig, Vocabulary};
pub use error::{Error, Result};
pub use matrix::Matrix;
pub use nea::{DocEmbeddings, EmbeddingSet, GeneralEmbeddings, NoiseTable, TrainConfig};
pub use topic_models::{AtmParams, FactorizedModel, LdaParams, MmsgtmParams, SamplerConfig};
