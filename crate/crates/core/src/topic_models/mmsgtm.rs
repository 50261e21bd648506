use rand::Rng;

use super::context::context_window;
use super::{smoothed, transpose_counts, SamplerConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampling::{draw_weighted, seeded_rng, SeededRng};

/// A trained mixed-membership skip-gram topic model: each input token draws a
/// topic from its word's `theta_word` row, and every context word around it
/// is emitted from that topic's `phi` row.
#[derive(Debug, Clone, PartialEq)]
pub struct MmsgtmParams {
    pub theta_word: Matrix,
    pub phi: Matrix,
    pub z: Vec<usize>,
    pub doc_lengths: Vec<usize>,
    pub window: usize,
    pub alpha: f64,
    pub beta: f64,
}

impl MmsgtmParams {
    pub fn num_topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn topic_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_topics()];
        for &k in &self.z {
            sizes[k] += 1;
        }
        sizes
    }
}

pub(crate) struct MmsgtmState<'a> {
    corpus: &'a Corpus,
    topics: usize,
    window: usize,
    alpha: f64,
    beta: f64,
    z: Vec<usize>,
    /// `input_topic[w * K + k]`: input tokens of word `w` assigned to `k`.
    input_topic: Vec<u32>,
    /// `context_topic[c * K + k]`: emissions of context word `c` by topic `k`.
    context_topic: Vec<u32>,
    topic_emissions: Vec<u32>,
}

impl<'a> MmsgtmState<'a> {
    fn new(corpus: &'a Corpus, config: &SamplerConfig, rng: &mut SeededRng) -> Self {
        let (alpha, beta) = config.priors();
        let (kc, w) = (config.topics, corpus.num_words());
        let mut state = MmsgtmState {
            corpus,
            topics: kc,
            window: config.window,
            alpha,
            beta,
            z: Vec::with_capacity(corpus.num_tokens()),
            input_topic: vec![0; w * kc],
            context_topic: vec![0; w * kc],
            topic_emissions: vec![0; kc],
        };
        for doc in &corpus.documents {
            let toks = &doc.tokens;
            for (i, &word) in toks.iter().enumerate() {
                let k = rng.random_range(0..kc);
                state.z.push(k);
                state.input_topic[word * kc + k] += 1;
                for j in context_window(i, toks.len(), config.window) {
                    state.context_topic[toks[j] * kc + k] += 1;
                    state.topic_emissions[k] += 1;
                }
            }
        }
        state
    }

    fn sweep(&mut self, rng: &mut SeededRng, log_weights: &mut [f64], weights: &mut [f64]) {
        let kc = self.topics;
        let w_beta = self.corpus.num_words() as f64 * self.beta;
        let mut contexts: Vec<(usize, u32)> = Vec::with_capacity(2 * self.window);
        let mut pos = 0;
        for doc in &self.corpus.documents {
            let toks = &doc.tokens;
            for (i, &word) in toks.iter().enumerate() {
                // Context words paired with how often each already appeared
                // earlier in this same context (for the Polya-urn terms).
                contexts.clear();
                for j in context_window(i, toks.len(), self.window) {
                    let c = toks[j];
                    let dup = contexts.iter().filter(|(prev, _)| *prev == c).count() as u32;
                    contexts.push((c, dup));
                }
                let m = contexts.len() as u32;

                let old = self.z[pos];
                self.input_topic[word * kc + old] -= 1;
                for &(c, _) in &contexts {
                    self.context_topic[c * kc + old] -= 1;
                }
                self.topic_emissions[old] -= m;

                let mut max = f64::NEG_INFINITY;
                for k in 0..kc {
                    let mut lw = (self.input_topic[word * kc + k] as f64 + self.alpha).ln();
                    let base = self.topic_emissions[k] as f64 + w_beta;
                    for (j, &(c, dup)) in contexts.iter().enumerate() {
                        lw += (self.context_topic[c * kc + k] as f64 + self.beta + dup as f64).ln()
                            - (base + j as f64).ln();
                    }
                    log_weights[k] = lw;
                    max = max.max(lw);
                }
                let mut total = 0.0;
                for k in 0..kc {
                    weights[k] = (log_weights[k] - max).exp();
                    total += weights[k];
                }
                let new = draw_weighted(weights, total, rng);

                self.z[pos] = new;
                self.input_topic[word * kc + new] += 1;
                for &(c, _) in &contexts {
                    self.context_topic[c * kc + new] += 1;
                }
                self.topic_emissions[new] += m;
                pos += 1;
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn counts_consistent(&self) -> bool {
        let kc = self.topics;
        let mut it = vec![0u32; self.input_topic.len()];
        let mut ct = vec![0u32; self.context_topic.len()];
        let mut te = vec![0u32; kc];
        let mut pos = 0;
        for doc in &self.corpus.documents {
            let toks = &doc.tokens;
            for (i, &word) in toks.iter().enumerate() {
                let k = self.z[pos];
                it[word * kc + k] += 1;
                for j in context_window(i, toks.len(), self.window) {
                    ct[toks[j] * kc + k] += 1;
                    te[k] += 1;
                }
                pos += 1;
            }
        }
        it == self.input_topic && ct == self.context_topic && te == self.topic_emissions
    }

    fn into_params(self) -> MmsgtmParams {
        let (kc, w) = (self.topics, self.corpus.num_words());
        MmsgtmParams {
            theta_word: smoothed(&self.input_topic, w, kc, self.alpha),
            phi: smoothed(&transpose_counts(&self.context_topic, w, kc), kc, w, self.beta),
            z: self.z,
            doc_lengths: self.corpus.documents.iter().map(|d| d.len()).collect(),
            window: self.window,
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

pub(crate) fn run_mmsgtm<'a>(
    corpus: &'a Corpus,
    config: &SamplerConfig,
    seed: u64,
) -> Result<MmsgtmState<'a>> {
    config.validate()?;
    corpus.validate()?;
    if corpus.documents.iter().all(|d| d.len() < 2) {
        return Err(Error::data("no document has two tokens, so there are no context pairs"));
    }
    let mut rng = seeded_rng(seed);
    let mut state = MmsgtmState::new(corpus, config, &mut rng);
    let mut log_weights = vec![0.0; config.topics];
    let mut weights = vec![0.0; config.topics];
    for _ in 0..config.iterations {
        state.sweep(&mut rng, &mut log_weights, &mut weights);
    }
    Ok(state)
}

/// Collapsed Gibbs sampling for the mixed-membership skip-gram topic model.
pub fn train_mmsgtm(corpus: &Corpus, config: &SamplerConfig, seed: u64) -> Result<MmsgtmParams> {
    Ok(run_mmsgtm(corpus, config, seed)?.into_params())
}
