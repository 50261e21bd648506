use super::embedding::{doc_embeddings_from_assignments, init_input, softmax_rows};
use super::engine::{self, LinkSlots, LossLog, PairSource, Params, Update};
use super::neg::NoiseTable;
use super::{DocEmbeddings, EmbeddingSet, TrainConfig};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::sampling::{derived_rng, AliasTable, SeededRng};
use crate::topic_models::LdaParams;

/// Draws `(topic, word)` pairs from a trained LDA model:
/// `d ~ Uniform(D)`, `z ~ theta[d]`, `w ~ phi[z]`.
pub struct LdaPairSampler {
    theta: Vec<AliasTable>,
    phi: Vec<AliasTable>,
}

impl LdaPairSampler {
    pub fn new(params: &LdaParams) -> Result<Self> {
        Ok(LdaPairSampler {
            theta: params.theta.iter_rows().map(AliasTable::new).collect::<Result<_>>()?,
            phi: params.phi.iter_rows().map(AliasTable::new).collect::<Result<_>>()?,
        })
    }

    #[inline]
    pub fn draw(&self, rng: &mut SeededRng) -> (usize, usize) {
        use rand::Rng;
        let d = rng.random_range(0..self.theta.len());
        let z = self.theta[d].sample(rng);
        (z, self.phi[z].sample(rng))
    }
}

impl PairSource for LdaPairSampler {
    fn draw(&self, rng: &mut SeededRng, out: &mut Vec<Update>) {
        let (z, w) = LdaPairSampler::draw(self, rng);
        out.push(Update {
            link: 0,
            input: z,
            output: w,
        });
    }
}

/// One minibatch of `batch_size` independent `(topic, word)` pairs.
pub fn sample_minibatch_lda(
    sampler: &LdaPairSampler,
    batch_size: usize,
    rng: &mut SeededRng,
) -> Vec<(usize, usize)> {
    (0..batch_size).map(|_| sampler.draw(rng)).collect()
}

/// Word marginal implied by the model, `p(w) = sum_d (1/D) sum_k theta_dk phi_kw`.
fn implied_word_marginal(params: &LdaParams) -> Vec<f64> {
    let d = params.num_docs() as f64;
    let mut topic_mass = vec![0.0; params.num_topics()];
    for row in params.theta.iter_rows() {
        topic_mass.iter_mut().zip(row).for_each(|(m, t)| *m += t / d);
    }
    let mut marginal = vec![0.0; params.num_words()];
    for (k, mass) in topic_mass.iter().enumerate() {
        marginal
            .iter_mut()
            .zip(params.phi.row(k))
            .for_each(|(m, p)| *m += mass * p);
    }
    marginal
}

#[derive(Debug, Clone)]
pub struct NeaLdaOutput {
    /// Topic vectors as inputs, word vectors as outputs.
    pub embeddings: EmbeddingSet,
    pub doc_embeddings: DocEmbeddings,
    /// Smoothed topic-word table.
    pub smoothed_phi: Matrix,
    pub loss: LossLog,
}

/// Trains topic and word embeddings that mimic `params`, then smooths the
/// topics and builds document vectors from the model's assignments.
pub fn train_nea_lda(params: &LdaParams, config: &TrainConfig, seed: u64) -> Result<NeaLdaOutput> {
    config.validate()?;
    let (k, w) = (params.num_topics(), params.num_words());
    if params.z.len() != params.doc_lengths.iter().sum::<usize>() {
        return Err(Error::data("topic assignments do not line up with document lengths"));
    }
    let sampler = LdaPairSampler::new(params)?;
    let noise = NoiseTable::from_marginal(&implied_word_marginal(params), config.noise_exponent)?;

    let mut init_rng = derived_rng(seed, 0);
    let mut state = Params {
        inputs: vec![init_input(k, config.dim, &mut init_rng)],
        outputs: vec![Matrix::zeros(w, config.dim)],
    };
    let links = [LinkSlots {
        input_slot: 0,
        output_slot: 0,
        noise,
    }];
    let loss = engine::train(&mut state, &links, &sampler, config, seed);

    let embeddings = EmbeddingSet::new(
        state.inputs.pop().expect("one input"),
        state.outputs.pop().expect("one output"),
        "topic",
        "word",
    )?;
    let smoothed_phi = smooth_topics(&embeddings)?;
    let doc_embeddings = doc_embeddings(params, &embeddings.input)?;
    Ok(NeaLdaOutput {
        embeddings,
        doc_embeddings,
        smoothed_phi,
        loss,
    })
}

/// Smoothed topics: row `k` is the softmax over words of `output . topic_k`.
pub fn smooth_topics(embeddings: &EmbeddingSet) -> Result<Matrix> {
    softmax_rows(&embeddings.input, &embeddings.output)
}

/// Document vectors summed from the unit topic vectors of each token's
/// assigned topic, then normalized.
pub fn doc_embeddings(params: &LdaParams, topic_vectors: &Matrix) -> Result<DocEmbeddings> {
    doc_embeddings_from_assignments(params.doc_assignments(), topic_vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{norm, total_variation};
    use crate::sampling::seeded_rng;

    fn toy(theta: Vec<Vec<f64>>, phi: Vec<Vec<f64>>) -> LdaParams {
        let d = theta.len();
        LdaParams {
            theta: Matrix::from_rows(&theta).unwrap(),
            phi: Matrix::from_rows(&phi).unwrap(),
            z: vec![0; d],
            doc_lengths: vec![1; d],
            alpha: 0.1,
            beta: 0.01,
        }
    }

    #[test]
    fn single_topic_words_follow_phi() {
        let phi = vec![0.1, 0.2, 0.3, 0.4];
        let params = toy(vec![vec![1.0]; 3], vec![phi.clone()]);
        let sampler = LdaPairSampler::new(&params).unwrap();
        let mut rng = seeded_rng(1);
        let n = 100_000;
        let mut counts = [0usize; 4];
        for (z, w) in sample_minibatch_lda(&sampler, n, &mut rng) {
            assert_eq!(z, 0);
            counts[w] += 1;
        }
        for (c, p) in counts.iter().zip(&phi) {
            let sigma = (p * (1.0 - p) / n as f64).sqrt();
            assert!((*c as f64 / n as f64 - p).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn one_hot_theta_fixes_the_topic() {
        let params = toy(
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
            vec![vec![0.5, 0.5], vec![0.2, 0.8]],
        );
        let sampler = LdaPairSampler::new(&params).unwrap();
        let mut rng = seeded_rng(2);
        assert!(sample_minibatch_lda(&sampler, 1000, &mut rng).iter().all(|&(z, _)| z == 1));
    }

    #[test]
    fn zero_minibatches_give_near_uniform_topics() {
        let params = toy(vec![vec![0.5, 0.5]], vec![vec![0.9, 0.1, 0.0], vec![0.0, 0.5, 0.5]]);
        let cfg = TrainConfig {
            dim: 8,
            minibatches: 0,
            ..Default::default()
        };
        let out = train_nea_lda(&params, &cfg, 3).unwrap();
        for row in out.smoothed_phi.iter_rows() {
            assert!(row.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-12));
        }
        assert!(out.loss.entries.is_empty());
    }

    #[test]
    fn single_topic_converges_to_phi() {
        let phi = vec![0.5, 0.25, 0.15, 0.1];
        let params = toy(vec![vec![1.0]; 2], vec![phi.clone()]);
        let cfg = TrainConfig {
            dim: 1,
            minibatches: 20_000,
            ..Default::default()
        };
        let out = train_nea_lda(&params, &cfg, 5).unwrap();
        let tv = total_variation(out.smoothed_phi.row(0), &phi);
        assert!(tv < 0.05, "tv={tv} row={:?}", out.smoothed_phi.row(0));
        assert!(out.smoothed_phi.is_row_stochastic(1e-9));
        for d in 0..2 {
            assert!((norm(out.doc_embeddings.vectors.row(d)) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn deterministic_under_seed() {
        let params = toy(vec![vec![0.3, 0.7]], vec![vec![0.6, 0.4], vec![0.1, 0.9]]);
        let cfg = TrainConfig {
            dim: 4,
            minibatches: 300,
            ..Default::default()
        };
        let a = train_nea_lda(&params, &cfg, 9).unwrap();
        let b = train_nea_lda(&params, &cfg, 9).unwrap();
        assert_eq!(a.embeddings, b.embeddings);
        assert_eq!(a.loss, b.loss);
    }

    #[test]
    fn hogwild_mode_trains_too() {
        let phi = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.1, 0.8]];
        let params = toy(vec![vec![0.5, 0.5]; 4], phi.clone());
        let cfg = TrainConfig {
            dim: 4,
            minibatches: 20_000,
            workers: 4,
            ..Default::default()
        };
        let out = train_nea_lda(&params, &cfg, 1).unwrap();
        for k in 0..2 {
            assert!(total_variation(out.smoothed_phi.row(k), &phi[k]) < 0.1);
        }
        assert_eq!(out.loss.entries.len(), 20);
    }
}
