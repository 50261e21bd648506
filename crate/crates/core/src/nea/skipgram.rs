use rand::Rng;

use super::embedding::init_input;
use super::engine::{self, LinkSlots, LossLog, PairSource, Params, Update};
use super::neg::NoiseTable;
use super::{DocEmbeddings, EmbeddingSet, TrainConfig};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::{norm, Matrix};
use crate::sampling::{derived_rng, SeededRng};
use crate::topic_models::context_pairs;

/// Uniform draws from the corpus's `(input word, context word)` pairs.
struct PairList(Vec<(usize, usize)>);

impl PairSource for PairList {
    fn draw(&self, rng: &mut SeededRng, out: &mut Vec<Update>) {
        let (input, output) = self.0[rng.random_range(0..self.0.len())];
        out.push(Update {
            link: 0,
            input,
            output,
        });
    }
}

#[derive(Debug, Clone)]
pub struct SkipGramOutput {
    /// Word input vectors and context output vectors.
    pub embeddings: EmbeddingSet,
    pub loss: LossLog,
}

/// Skip-gram with negative sampling over every `(w_i, w_c)` pair within
/// `window` positions. Noise is the context-word frequency raised to the
/// configured exponent.
pub fn train_skipgram(
    corpus: &Corpus,
    window: usize,
    config: &TrainConfig,
    seed: u64,
) -> Result<SkipGramOutput> {
    config.validate()?;
    if window == 0 {
        return Err(Error::config("context window must be at least 1"));
    }
    let pairs = context_pairs(corpus, window);
    if pairs.is_empty() {
        return Err(Error::data("no document has two tokens to pair"));
    }
    let w = corpus.num_words();
    let mut context_counts = vec![0.0; w];
    for &(_, c) in &pairs {
        context_counts[c] += 1.0;
    }
    let links = [LinkSlots {
        input_slot: 0,
        output_slot: 0,
        noise: NoiseTable::from_marginal(&context_counts, config.noise_exponent)?,
    }];

    let mut init_rng = derived_rng(seed, 0);
    let mut params = Params {
        inputs: vec![init_input(w, config.dim, &mut init_rng)],
        outputs: vec![Matrix::zeros(w, config.dim)],
    };
    let loss = engine::train(&mut params, &links, &PairList(pairs), config, seed);
    let embeddings = EmbeddingSet::new(
        params.inputs.pop().expect("one input"),
        params.outputs.pop().expect("one output"),
        "word",
        "context",
    )?;
    Ok(SkipGramOutput { embeddings, loss })
}

/// Document features from word vectors: the mean of each token's unit input
/// vector, normalized. Zero word vectors contribute nothing.
pub fn sg_doc_features(corpus: &Corpus, word_vectors: &Matrix) -> Result<DocEmbeddings> {
    if word_vectors.rows() != corpus.num_words() {
        return Err(Error::Dimension {
            expected: corpus.num_words(),
            actual: word_vectors.rows(),
        });
    }
    let dim = word_vectors.cols();
    let mut sums = Matrix::zeros(corpus.num_docs(), dim);
    for (d, doc) in corpus.documents.iter().enumerate() {
        let acc = sums.row_mut(d);
        for &t in &doc.tokens {
            let v = word_vectors.row(t);
            let n = norm(v);
            if n > 0.0 && n.is_finite() {
                acc.iter_mut().zip(v).for_each(|(a, x)| *a += x / n);
            }
        }
    }
    Ok(DocEmbeddings::from_sums(sums))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{dot, total_variation};
    use crate::nea::neg::sigmoid;
    use crate::topic_models::sgtm_mle;

    fn alternating(n: usize) -> Corpus {
        let tokens = (0..n).map(|i| i % 2).collect();
        Corpus::from_token_ids(2, vec![tokens]).unwrap()
    }

    #[test]
    fn alternating_pair_is_learned() {
        // With two words, unrejected negatives would cap the positive
        // score at 1 / (1 + k/2).
        let cfg = TrainConfig {
            dim: 8,
            minibatches: 5_000,
            reject_positive_negatives: true,
            ..Default::default()
        };
        let out = train_skipgram(&alternating(50), 1, &cfg, 1).unwrap();
        let e = &out.embeddings;
        assert!(sigmoid(dot(e.output.row(1), e.input.row(0))) > 0.9);
    }

    #[test]
    fn untrained_conditionals_are_uniform() {
        let cfg = TrainConfig {
            dim: 8,
            minibatches: 0,
            ..Default::default()
        };
        let out = train_skipgram(&alternating(10), 1, &cfg, 1).unwrap();
        let cond = out.embeddings.conditionals().unwrap();
        assert!(cond.as_slice().iter().all(|p| (p - 0.5).abs() < 1e-12));
    }

    #[test]
    fn conditionals_approach_the_cooccurrence_table() {
        let corpus = Corpus::from_token_ids(
            3,
            vec![vec![0, 1, 2, 0, 0, 1, 2, 2, 1, 0], vec![2, 1, 1, 0, 2, 0, 1]],
        )
        .unwrap();
        let mle = sgtm_mle(&corpus, 2).unwrap();
        let cfg = TrainConfig {
            dim: 4,
            minibatches: 30_000,
            ..Default::default()
        };
        let out = train_skipgram(&corpus, 2, &cfg, 7).unwrap();
        let cond = out.embeddings.conditionals().unwrap();
        for w in 0..3 {
            let tv = total_variation(cond.row(w), mle.table.row(w));
            assert!(tv < 0.1, "row {w}: tv={tv}");
        }
    }

    #[test]
    fn rejects_zero_window() {
        let cfg = TrainConfig::default();
        assert!(train_skipgram(&alternating(4), 0, &cfg, 1).is_err());
    }

    #[test]
    fn doc_features_are_normalized_means() {
        let vectors = Matrix::from_rows(&[
            vec![2.0, 0.0, 0.0],
            vec![0.0, 0.5, 0.0],
            vec![0.0, 0.0, 3.0],
        ])
        .unwrap();
        let corpus =
            Corpus::from_token_ids(3, vec![vec![1], vec![1, 1], vec![0, 1, 2], vec![]]).unwrap();
        let f = sg_doc_features(&corpus, &vectors).unwrap();
        assert_eq!(f.vectors.row(0), &[0.0, 1.0, 0.0]);
        assert_eq!(f.vectors.row(1), &[0.0, 1.0, 0.0]);
        let s = 1.0 / 3f64.sqrt();
        for (a, b) in f.vectors.row(2).iter().zip([s, s, s]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(f.empty_docs, vec![3]);
    }
}
