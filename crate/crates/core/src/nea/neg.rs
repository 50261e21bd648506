use rand::Rng;

use super::EmbeddingSet;
use crate::error::{Error, Result};
use crate::matrix::{dot, Matrix};
use crate::sampling::AliasTable;

#[inline]
pub(crate) fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `ln(sigmoid(x))` without overflow for large `|x|`.
#[inline]
pub(crate) fn log_sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        -(-x).exp().ln_1p()
    } else {
        x - x.exp().ln_1p()
    }
}

/// Distribution negatives are drawn from.
#[derive(Debug, Clone)]
pub struct NoiseTable {
    table: AliasTable,
}

impl NoiseTable {
    /// Noise proportional to `marginal[i]^exponent`. With exponent 0 every
    /// outcome, including zero-mass ones, is equally likely.
    pub fn from_marginal(marginal: &[f64], exponent: f64) -> Result<Self> {
        let weights: Vec<f64> = marginal.iter().map(|&p| p.max(0.0).powf(exponent)).collect();
        Ok(NoiseTable {
            table: AliasTable::new(&weights)?,
        })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Ok(NoiseTable {
            table: AliasTable::new(&vec![1.0; n])?,
        })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.table.sample(rng)
    }

    pub fn probabilities(&self) -> &[f64] {
        self.table.probabilities()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }
}

const REJECTION_RETRIES: usize = 10;

/// Draws `k` negatives into `out`. When `reject_positive` is set, draws equal
/// to `positive` are retried a few times and then dropped.
pub fn draw_negatives<R: Rng + ?Sized>(
    noise: &NoiseTable,
    positive: usize,
    k: usize,
    reject_positive: bool,
    rng: &mut R,
    out: &mut Vec<usize>,
) {
    out.clear();
    for _ in 0..k {
        let mut draw = noise.sample(rng);
        if reject_positive {
            let mut tries = 0;
            while draw == positive && tries < REJECTION_RETRIES {
                draw = noise.sample(rng);
                tries += 1;
            }
            if draw == positive {
                continue;
            }
        }
        out.push(draw);
    }
}

fn check_dims(input: &[f64], positive: &[f64], negatives: &[&[f64]]) -> Result<()> {
    for v in std::iter::once(positive).chain(negatives.iter().copied()) {
        if v.len() != input.len() {
            return Err(Error::Dimension {
                expected: input.len(),
                actual: v.len(),
            });
        }
    }
    Ok(())
}

/// `log s(u_pos . v) + sum_i log s(-u_neg_i . v)` for input vector `v`.
pub fn neg_objective(input: &[f64], positive: &[f64], negatives: &[&[f64]]) -> Result<f64> {
    check_dims(input, positive, negatives)?;
    Ok(log_sigmoid(dot(positive, input))
        + negatives
            .iter()
            .map(|u| log_sigmoid(-dot(u, input)))
            .sum::<f64>())
}

/// Gradient of [`neg_objective`] with respect to each argument.
#[derive(Debug, Clone, PartialEq)]
pub struct NegGradient {
    pub input: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

pub fn neg_gradient(input: &[f64], positive: &[f64], negatives: &[&[f64]]) -> Result<NegGradient> {
    check_dims(input, positive, negatives)?;
    let pos_coef = 1.0 - sigmoid(dot(positive, input));
    let mut grad_in: Vec<f64> = positive.iter().map(|u| pos_coef * u).collect();
    let mut grad_negs = Vec::with_capacity(negatives.len());
    for u in negatives {
        let coef = -sigmoid(dot(u, input));
        grad_in.iter_mut().zip(u.iter()).for_each(|(g, x)| *g += coef * x);
        grad_negs.push(input.iter().map(|v| coef * v).collect());
    }
    Ok(NegGradient {
        input: grad_in,
        positive: input.iter().map(|v| pos_coef * v).collect(),
        negatives: grad_negs,
    })
}

/// Row access for the update kernel. Dense matrices and the lock-free
/// shared matrices of parallel training both implement it.
pub(crate) trait RowStore {
    fn dim(&self) -> usize;
    fn read_row(&self, row: usize, out: &mut [f64]);
    fn add_row(&mut self, row: usize, delta: &[f64], scale: f64);
}

impl RowStore for Matrix {
    fn dim(&self) -> usize {
        self.cols()
    }

    fn read_row(&self, row: usize, out: &mut [f64]) {
        out.copy_from_slice(self.row(row));
    }

    fn add_row(&mut self, row: usize, delta: &[f64], scale: f64) {
        self.row_mut(row)
            .iter_mut()
            .zip(delta)
            .for_each(|(x, d)| *x += scale * d);
    }
}

/// Reusable buffers for [`neg_step`].
#[derive(Debug, Default)]
pub(crate) struct NegScratch {
    input: Vec<f64>,
    outputs: Vec<f64>,
    coefs: Vec<f64>,
    grad_in: Vec<f64>,
}

/// One simultaneous gradient-ascent step on the NEG objective: all dot
/// products are taken before any vector moves. Returns the objective at the
/// pre-update parameters.
pub(crate) fn neg_step<I: RowStore, O: RowStore>(
    inputs: &mut I,
    input_id: usize,
    outputs: &mut O,
    positive: usize,
    negatives: &[usize],
    lr: f64,
    s: &mut NegScratch,
) -> f64 {
    let dim = inputs.dim();
    let m = negatives.len() + 1;
    s.input.resize(dim, 0.0);
    s.outputs.resize(m * dim, 0.0);
    s.coefs.resize(m, 0.0);
    s.grad_in.clear();
    s.grad_in.resize(dim, 0.0);

    inputs.read_row(input_id, &mut s.input);
    let mut objective = 0.0;
    for (j, id) in std::iter::once(positive).chain(negatives.iter().copied()).enumerate() {
        let u = &mut s.outputs[j * dim..(j + 1) * dim];
        outputs.read_row(id, u);
        let x = dot(u, &s.input);
        let (coef, term) = if j == 0 {
            (1.0 - sigmoid(x), log_sigmoid(x))
        } else {
            (-sigmoid(x), log_sigmoid(-x))
        };
        objective += term;
        s.coefs[j] = coef;
        s.grad_in.iter_mut().zip(u.iter()).for_each(|(g, x)| *g += coef * x);
    }
    if lr != 0.0 {
        for (j, id) in std::iter::once(positive).chain(negatives.iter().copied()).enumerate() {
            outputs.add_row(id, &s.input, lr * s.coefs[j]);
        }
        inputs.add_row(input_id, &s.grad_in, lr);
    }
    objective
}

/// One NEG step for `(input_id -> positive_id)` with the given negatives.
pub fn neg_update_with(
    embeddings: &mut EmbeddingSet,
    input_id: usize,
    positive_id: usize,
    negatives: &[usize],
    lr: f64,
) -> Result<f64> {
    let (n_in, n_out) = (embeddings.input.rows(), embeddings.output.rows());
    if input_id >= n_in {
        return Err(Error::data(format!("input id {input_id} >= {n_in}")));
    }
    if let Some(bad) = std::iter::once(&positive_id).chain(negatives).find(|&&o| o >= n_out) {
        return Err(Error::data(format!("output id {bad} >= {n_out}")));
    }
    let mut scratch = NegScratch::default();
    Ok(neg_step(
        &mut embeddings.input,
        input_id,
        &mut embeddings.output,
        positive_id,
        negatives,
        lr,
        &mut scratch,
    ))
}

/// One NEG step with `k` negatives drawn from `noise`. Returns the objective
/// before the step.
pub fn neg_update<R: Rng + ?Sized>(
    embeddings: &mut EmbeddingSet,
    input_id: usize,
    positive_id: usize,
    noise: &NoiseTable,
    k: usize,
    lr: f64,
    rng: &mut R,
) -> Result<f64> {
    let mut negatives = Vec::with_capacity(k);
    draw_negatives(noise, positive_id, k, false, rng, &mut negatives);
    neg_update_with(embeddings, input_id, positive_id, &negatives, lr)
}
