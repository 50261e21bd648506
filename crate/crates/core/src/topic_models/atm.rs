use rand::Rng;

use super::{smoothed, transpose_counts, SamplerConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampling::{draw_weighted, seeded_rng, SeededRng};

/// A trained author-topic model. `z` and `a` hold the topic and author of
/// every token in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct AtmParams {
    pub theta_author: Matrix,
    pub phi: Matrix,
    pub z: Vec<usize>,
    pub a: Vec<usize>,
    pub doc_lengths: Vec<usize>,
    pub alpha: f64,
    pub beta: f64,
}

impl AtmParams {
    pub fn num_topics(&self) -> usize {
        self.phi.rows()
    }

    pub fn num_authors(&self) -> usize {
        self.theta_author.rows()
    }

    pub fn topic_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_topics()];
        for &k in &self.z {
            sizes[k] += 1;
        }
        sizes
    }
}

pub(crate) struct AtmState<'a> {
    corpus: &'a Corpus,
    topics: usize,
    alpha: f64,
    beta: f64,
    z: Vec<usize>,
    a: Vec<usize>,
    author_topic: Vec<u32>,
    author_total: Vec<u32>,
    word_topic: Vec<u32>,
    topic_total: Vec<u32>,
}

impl<'a> AtmState<'a> {
    fn new(corpus: &'a Corpus, topics: usize, alpha: f64, beta: f64, rng: &mut SeededRng) -> Self {
        let num_authors = corpus.num_authors();
        let mut state = AtmState {
            corpus,
            topics,
            alpha,
            beta,
            z: Vec::with_capacity(corpus.num_tokens()),
            a: Vec::with_capacity(corpus.num_tokens()),
            author_topic: vec![0; num_authors * topics],
            author_total: vec![0; num_authors],
            word_topic: vec![0; corpus.num_words() * topics],
            topic_total: vec![0; topics],
        };
        for doc in &corpus.documents {
            let authors = doc.authors.as_deref().expect("validated");
            for &word in &doc.tokens {
                let author = authors[rng.random_range(0..authors.len())];
                let k = rng.random_range(0..topics);
                state.z.push(k);
                state.a.push(author);
                state.author_topic[author * topics + k] += 1;
                state.author_total[author] += 1;
                state.word_topic[word * topics + k] += 1;
                state.topic_total[k] += 1;
            }
        }
        state
    }

    fn sweep(&mut self, rng: &mut SeededRng, weights: &mut Vec<f64>) {
        let kc = self.topics;
        let w_beta = self.corpus.num_words() as f64 * self.beta;
        let k_alpha = kc as f64 * self.alpha;
        let mut pos = 0;
        for doc in &self.corpus.documents {
            let authors = doc.authors.as_deref().expect("validated");
            weights.resize(authors.len() * kc, 0.0);
            for &word in &doc.tokens {
                let (old_a, old_k) = (self.a[pos], self.z[pos]);
                self.author_topic[old_a * kc + old_k] -= 1;
                self.author_total[old_a] -= 1;
                self.word_topic[word * kc + old_k] -= 1;
                self.topic_total[old_k] -= 1;

                // Joint conditional over (author in A_d, topic).
                let mut total = 0.0;
                for (slot, &author) in authors.iter().enumerate() {
                    let denom = self.author_total[author] as f64 + k_alpha;
                    for k in 0..kc {
                        let p = (self.author_topic[author * kc + k] as f64 + self.alpha) / denom
                            * (self.word_topic[word * kc + k] as f64 + self.beta)
                            / (self.topic_total[k] as f64 + w_beta);
                        weights[slot * kc + k] = p;
                        total += p;
                    }
                }
                let joint = draw_weighted(weights, total, rng);
                let (new_a, new_k) = (authors[joint / kc], joint % kc);

                self.a[pos] = new_a;
                self.z[pos] = new_k;
                self.author_topic[new_a * kc + new_k] += 1;
                self.author_total[new_a] += 1;
                self.word_topic[word * kc + new_k] += 1;
                self.topic_total[new_k] += 1;
                pos += 1;
            }
        }
    }

    #[cfg(test)]
    pub(crate) fn counts_consistent(&self) -> bool {
        let kc = self.topics;
        let mut at = vec![0u32; self.author_topic.len()];
        let mut atot = vec![0u32; self.author_total.len()];
        let mut wt = vec![0u32; self.word_topic.len()];
        let mut tt = vec![0u32; kc];
        let mut pos = 0;
        for doc in &self.corpus.documents {
            let authors = doc.authors.as_deref().unwrap_or(&[]);
            for &word in &doc.tokens {
                let (a, k) = (self.a[pos], self.z[pos]);
                if !authors.contains(&a) {
                    return false;
                }
                at[a * kc + k] += 1;
                atot[a] += 1;
                wt[word * kc + k] += 1;
                tt[k] += 1;
                pos += 1;
            }
        }
        at == self.author_topic && atot == self.author_total && wt == self.word_topic && tt == self.topic_total
    }

    fn into_params(self) -> AtmParams {
        let kc = self.topics;
        let w = self.corpus.num_words();
        AtmParams {
            theta_author: smoothed(&self.author_topic, self.author_total.len(), kc, self.alpha),
            phi: smoothed(&transpose_counts(&self.word_topic, w, kc), kc, w, self.beta),
            z: self.z,
            a: self.a,
            doc_lengths: self.corpus.documents.iter().map(|d| d.len()).collect(),
            alpha: self.alpha,
            beta: self.beta,
        }
    }
}

pub(crate) fn run_atm<'a>(corpus: &'a Corpus, config: &SamplerConfig, seed: u64) -> Result<AtmState<'a>> {
    config.validate()?;
    corpus.validate()?;
    for (d, doc) in corpus.documents.iter().enumerate() {
        if doc.authors.as_ref().is_none_or(Vec::is_empty) {
            return Err(Error::data(format!("document {d} has no authors")));
        }
    }
    let (alpha, beta) = config.priors();
    let mut rng = seeded_rng(seed);
    let mut state = AtmState::new(corpus, config.topics, alpha, beta, &mut rng);
    let mut weights = Vec::new();
    for _ in 0..config.iterations {
        state.sweep(&mut rng, &mut weights);
    }
    Ok(state)
}

/// Collapsed Gibbs sampling for the author-topic model, drawing each token's
/// author and topic jointly.
pub fn train_atm(corpus: &Corpus, config: &SamplerConfig, seed: u64) -> Result<AtmParams> {
    Ok(run_atm(corpus, config, seed)?.into_params())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Vocabulary};

    fn authored(docs: Vec<(Vec<usize>, Vec<usize>)>, words: usize, authors: usize) -> Corpus {
        let documents = docs
            .into_iter()
            .map(|(t, a)| Document::new(t).with_authors(a))
            .collect();
        let names = (0..authors).map(|i| format!("a{i}")).collect();
        Corpus::new(Vocabulary::synthetic(words), documents, Some(names), None).unwrap()
    }

    #[test]
    fn missing_authors_rejected() {
        let c = Corpus::from_token_ids(2, vec![vec![0, 1]]).unwrap();
        assert!(train_atm(&c, &SamplerConfig::new(2, 1), 0).is_err());
        let c = authored(vec![(vec![0], vec![]), (vec![1], vec![0])], 2, 1);
        assert!(matches!(train_atm(&c, &SamplerConfig::new(2, 1), 0), Err(Error::Data(_))));
    }

    #[test]
    fn single_author_single_topic_is_unigram() {
        let c = authored(vec![(vec![0, 1, 1], vec![0]), (vec![2, 1], vec![0])], 3, 1);
        let p = train_atm(&c, &SamplerConfig::new(1, 2), 0).unwrap();
        let n = 5.0;
        let counts = [1.0, 3.0, 1.0];
        for w in 0..3 {
            let expected = (counts[w] + p.beta) / (n + 3.0 * p.beta);
            assert!((p.phi.get(0, w) - expected).abs() < 1e-15);
        }
        assert!((p.theta_author.get(0, 0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn shared_author_holds_corpus_topic_proportions() {
        let c = authored(
            vec![(vec![0, 1, 2, 3], vec![0]), (vec![3, 2, 1], vec![0]), (vec![0, 0], vec![0])],
            4,
            1,
        );
        let p = train_atm(&c, &SamplerConfig::new(2, 10), 3).unwrap();
        assert_eq!(p.num_authors(), 1);
        let sizes = p.topic_sizes();
        for k in 0..2 {
            let expected = (sizes[k] as f64 + p.alpha) / (9.0 + 2.0 * p.alpha);
            assert!((p.theta_author.get(0, k) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn assignments_respect_author_lists_and_counts() {
        let c = authored(
            vec![(vec![0, 1, 2], vec![0, 1]), (vec![2, 3], vec![1]), (vec![3, 0, 1], vec![2, 0])],
            4,
            3,
        );
        let state = run_atm(&c, &SamplerConfig::new(3, 25), 8).unwrap();
        assert!(state.counts_consistent());
        let p = state.into_params();
        assert!(p.theta_author.is_row_stochastic(1e-9));
        assert!(p.phi.is_row_stochastic(1e-9));
        assert_eq!(&p.a[3..5], &[1, 1]);
    }

    #[test]
    fn reproducible_under_seed() {
        let c = authored(vec![(vec![0, 1, 2], vec![0, 1]), (vec![2, 3], vec![1])], 4, 2);
        let cfg = SamplerConfig::new(2, 5);
        assert_eq!(train_atm(&c, &cfg, 1).unwrap(), train_atm(&c, &cfg, 1).unwrap());
    }
}
