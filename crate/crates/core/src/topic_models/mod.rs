//! Collapsed Gibbs samplers and the parameter tables NEA consumes.

mod atm;
mod context;
mod factorized;
mod io;
mod lda;
mod mmsgtm;
mod sgtm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub use atm::{train_atm, AtmParams};
pub use context::{context_pairs, context_window};
pub use factorized::{as_factorized, FactorizedModel, Link, Variable};
pub use io::{load_model, save_model, TopicModel, MODEL_KIND};
pub use lda::{infer_lda, train_lda, LdaParams};
pub use mmsgtm::{train_mmsgtm, MmsgtmParams};
pub use sgtm::{sgtm_mle, SgtmTable};

/// Settings shared by the three samplers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerConfig {
    pub topics: usize,
    /// Document-topic prior. `None` picks the default for `topics`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Topic-word prior. `None` picks the default for `topics`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    pub iterations: usize,
    /// Context radius for the skip-gram topic models.
    pub window: usize,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            topics: 10,
            alpha: None,
            beta: None,
            iterations: 200,
            window: 5,
        }
    }
}

/// Priors used when none are given: `(0.1, 0.01)` below 500 topics,
/// `(0.01, 0.001)` from 500 up.
pub fn default_priors(topics: usize) -> (f64, f64) {
    if topics < 500 {
        (0.1, 0.01)
    } else {
        (0.01, 0.001)
    }
}

impl SamplerConfig {
    pub fn new(topics: usize, iterations: usize) -> Self {
        SamplerConfig {
            topics,
            iterations,
            ..Default::default()
        }
    }

    pub fn priors(&self) -> (f64, f64) {
        let (a, b) = default_priors(self.topics);
        (self.alpha.unwrap_or(a), self.beta.unwrap_or(b))
    }

    pub fn validate(&self) -> Result<()> {
        let (alpha, beta) = self.priors();
        if self.topics == 0 {
            return Err(Error::config("number of topics must be at least 1"));
        }
        if !(alpha > 0.0 && alpha.is_finite()) || !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::config(format!(
                "priors must be positive, got alpha={alpha} beta={beta}"
            )));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations must be at least 1"));
        }
        if self.window == 0 {
            return Err(Error::config("context window must be at least 1"));
        }
        Ok(())
    }
}

/// `(count + prior) / (total + width * prior)` over the rows of a count table.
pub(crate) fn smoothed(counts: &[u32], rows: usize, cols: usize, prior: f64) -> Matrix {
    let mut m = Matrix::zeros(rows, cols);
    for r in 0..rows {
        let src = &counts[r * cols..(r + 1) * cols];
        let total: f64 = src.iter().map(|&c| c as f64).sum::<f64>() + cols as f64 * prior;
        for (dst, &c) in m.row_mut(r).iter_mut().zip(src) {
            *dst = (c as f64 + prior) / total;
        }
    }
    m
}

/// Transposes a word-major `W x K` count table into topic-major `K x W`.
pub(crate) fn transpose_counts(word_topic: &[u32], words: usize, topics: usize) -> Vec<u32> {
    let mut out = vec![0; words * topics];
    for w in 0..words {
        for k in 0..topics {
            out[k * words + w] = word_topic[w * topics + k];
        }
    }
    out
}
