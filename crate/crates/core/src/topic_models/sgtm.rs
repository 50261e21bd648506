use super::context::context_pairs;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Maximum-likelihood naive Bayes skip-gram topic model.
#[derive(Debug, Clone, PartialEq)]
pub struct SgtmTable {
    /// `counts[(input, context)]`: co-occurrences within the window.
    pub counts: Matrix,
    /// Row-normalized `counts`; rows of never-seen inputs are all zero.
    pub table: Matrix,
    /// Whether each input word had at least one context pair.
    pub defined: Vec<bool>,
}

impl SgtmTable {
    pub fn undefined_rows(&self) -> Vec<usize> {
        (0..self.defined.len()).filter(|&w| !self.defined[w]).collect()
    }

    /// Empirical input distribution `p_data(w_i) = N_{w_i} / N` over pairs.
    pub fn input_marginal(&self) -> Vec<f64> {
        let row_totals: Vec<f64> = self.counts.iter_rows().map(|r| r.iter().sum()).collect();
        let n: f64 = row_totals.iter().sum();
        row_totals.into_iter().map(|c| c / n).collect()
    }
}

/// `phi[w_i][w_c] = N(w_c, w_i) / N(w_i)` from window co-occurrence counts.
pub fn sgtm_mle(corpus: &Corpus, window: usize) -> Result<SgtmTable> {
    if window == 0 {
        return Err(Error::config("context window must be at least 1"));
    }
    let w = corpus.num_words();
    let pairs = context_pairs(corpus, window);
    if pairs.is_empty() {
        return Err(Error::data("corpus has no context pairs"));
    }
    let mut counts = Matrix::zeros(w, w);
    for (input, ctx) in pairs {
        let v = counts.get(input, ctx);
        counts.set(input, ctx, v + 1.0);
    }
    let mut table = counts.clone();
    table.normalize_rows();
    let defined = counts.iter_rows().map(|r| r.iter().any(|&c| c > 0.0)).collect();
    Ok(SgtmTable {
        counts,
        table,
        defined,
    })
}
