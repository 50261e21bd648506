use rand::Rng;

use super::{smoothed, transpose_counts, SamplerConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampling::{draw_weighted, seeded_rng, SeededRng};

/// A trained LDA model: smoothed `theta` (D x K), `phi` (K x W) and the final
/// topic assignment of every token, flattened in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct LdaParams {
    pub theta: Matrix,
    pub phi: Matrix,
    pub z: Vec<usize>,
    pub doc_lengths: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
}

impl LdaParams {
    pub fn num_topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn num_words(&self) -> usize {
        self.phi.cols()
    }

    pub fn num_docs(&self) -> usize {
        self.theta.rows()
    }

    /// Topic assignments, one slice per document.
    pub fn doc_assignments(&self) -> impl Iterator<Item = &[usize]> {
        let mut start = 0;
        self.doc_lengths.iter().map(move |&n| {
            let slice = &self.z[start..start + n];
            start += n;
            slice
        })
    }

    /// Number of tokens assigned to each topic.
    pub fn topic_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_topics()];
        for &k in &self.z {
            sizes[k] += 1;
        }
        sizes
    }
}

/// Count state of the collapsed LDA sampler.
pub(crate) struct LdaState<'a> {
    corpus: &'a Corpus,
    topics: usize,
    alpha: f64,
    beta: f64,
    z: Vec<usize>,
    doc_topic: Vec<u32>,
    /// Word-major: `word_topic[w * K + k]`.
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
    /// When set, topic-word probabilities are held fixed (fold-in).
    fixed_phi: Option<&'a Matrix>,
}

impl<'a> LdaState<'a> {
    fn new(
        corpus: &'a Corpus,
        topics: usize,
        alpha: f64,
        beta: f64,
        fixed_phi: Option<&'a Matrix>,
        rng: &mut SeededRng,
    ) -> Self {
        let w = corpus.num_words();
        let mut state = LdaState {
            corpus,
            topics,
            alpha,
            beta,
            z: Vec::with_capacity(corpus.num_tokens()),
            doc_topic: vec![0; corpus.num_docs() * topics],
            word_topic: vec![0; w * topics],
            topic_total: vec![0; topics],
            fixed_phi,
        };
        for (d, doc) in corpus.documents.iter().enumerate() {
            for &word in &doc.tokens {
                let k = rng.random_range(0..topics);
                state.z.push(k);
                state.doc_topic[d * topics + k] += 1;
                state.word_topic[word * topics + k] += 1;
                state.topic_total[k] += 1;
            }
        }
        state
    }

    fn sweep(&mut self, rng: &mut SeededRng, weights: &mut [f64]) {
        let k_count = self.topics;
        let w_beta = self.corpus.num_words() as f64 * self.beta;
        let mut pos = 0;
        for (d, doc) in self.corpus.documents.iter().enumerate() {
            let dt = d * k_count;
            for &word in &doc.tokens {
                let old = self.z[pos];
                let wt = word * k_count;
                self.doc_topic[dt + old] -= 1;
                self.word_topic[wt + old] -= 1;
                self.topic_total[old] -= 1;

                let mut total = 0.0;
                match self.fixed_phi {
                    None => {
                        for k in 0..k_count {
                            let p = (self.doc_topic[dt + k] as f64 + self.alpha)
                                * (self.word_topic[wt + k] as f64 + self.beta)
                                / (self.topic_total[k] as f64 + w_beta);
                            weights[k] = p;
                            total += p;
                        }
                    }
                    Some(phi) => {
                        for k in 0..k_count {
                            let p = (self.doc_topic[dt + k] as f64 + self.alpha) * phi.get(k, word);
                            weights[k] = p;
                            total += p;
                        }
                    }
                }
                let new = draw_weighted(weights, total, rng);

                self.z[pos] = new;
                self.doc_topic[dt + new] += 1;
                self.word_topic[wt + new] += 1;
                self.topic_total[new] += 1;
                pos += 1;
            }
        }
    }

    /// Recomputes every count from `z` and compares with the caches.
    #[cfg(test)]
    pub(crate) fn counts_consistent(&self) -> bool {
        let k_count = self.topics;
        let mut dt = vec![0u32; self.doc_topic.len()];
        let mut wt = vec![0u32; self.word_topic.len()];
        let mut tt = vec![0u32; k_count];
        let mut pos = 0;
        for (d, doc) in self.corpus.documents.iter().enumerate() {
            for &word in &doc.tokens {
                let k = self.z[pos];
                dt[d * k_count + k] += 1;
                wt[word * k_count + k] += 1;
                tt[k] += 1;
                pos += 1;
            }
        }
        dt == self.doc_topic && wt == self.word_topic && tt == self.topic_total
    }

    fn into_params(self) -> LdaParams {
        let k = self.topics;
        let w = self.corpus.num_words();
        let theta = smoothed(&self.doc_topic, self.corpus.num_docs(), k, self.alpha);
        let phi = match self.fixed_phi {
            Some(phi) => phi.clone(),
            None => smoothed(&transpose_counts(&self.word_topic, w, k), k, w, self.beta),
        };
        LdaParams {
            theta,
            phi,
            z: self.z,
            doc_lengths: self.corpus.documents.iter().map(|d| d.len()).collect(),
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

pub(crate) fn run_lda<'a>(
    corpus: &'a Corpus,
    config: &SamplerConfig,
    seed: u64,
    fixed_phi: Option<&'a Matrix>,
) -> Result<LdaState<'a>> {
    config.validate()?;
    corpus.validate()?;
    let (alpha, beta) = config.priors();
    let mut rng = seeded_rng(seed);
    let mut state = LdaState::new(corpus, config.topics, alpha, beta, fixed_phi, &mut rng);
    let mut weights = vec![0.0; config.topics];
    for _ in 0..config.iterations {
        state.sweep(&mut rng, &mut weights);
    }
    Ok(state)
}

/// Collapsed Gibbs sampling for LDA. The estimates come from the counts of
/// the final sweep.
pub fn train_lda(corpus: &Corpus, config: &SamplerConfig, seed: u64) -> Result<LdaParams> {
    Ok(run_lda(corpus, config, seed, None)?.into_params())
}

/// Samples topic assignments for unseen documents with `phi` held fixed.
/// The returned `theta` and `z` describe `corpus`; `phi` is copied through.
pub fn infer_lda(
    model: &LdaParams,
    corpus: &Corpus,
    iterations: usize,
    seed: u64,
) -> Result<LdaParams> {
    if corpus.num_words() != model.num_words() {
        return Err(Error::Dimension {
            expected: model.num_words(),
            actual: corpus.num_words(),
        });
    }
    let config = SamplerConfig {
        topics: model.num_topics(),
        alpha: Some(model.alpha),
        beta: Some(model.beta),
        iterations,
        ..Default::default()
    };
    config.validate()?;
    // Held-out halves may contain documents (or a whole corpus) with no
    // surviving tokens, so only the id ranges are checked here.
    if corpus.documents.iter().flat_map(|d| &d.tokens).any(|&t| t >= corpus.num_words()) {
        return Err(Error::data("token id out of range"));
    }
    let mut rng = seeded_rng(seed);
    let mut state = LdaState::new(
        corpus,
        config.topics,
        model.alpha,
        model.beta,
        Some(&model.phi),
        &mut rng,
    );
    let mut weights = vec![0.0; config.topics];
    for _ in 0..iterations {
        state.sweep(&mut rng, &mut weights);
    }
    Ok(state.into_params())
}
