use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::{dot, norm, softmax_into, Matrix};

/// Input and output vectors of one log-bilinear conditional
/// `p(out | in) ∝ exp(output[out] . input[in])`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    pub input: Matrix,
    pub output: Matrix,
    pub input_kind: String,
    pub output_kind: String,
}

impl EmbeddingSet {
    /// Inputs uniform in `[-0.5/dim, 0.5/dim]`, outputs zero.
    pub fn random_init<R: Rng + ?Sized>(
        n_inputs: usize,
        n_outputs: usize,
        dim: usize,
        input_kind: &str,
        output_kind: &str,
        rng: &mut R,
    ) -> Self {
        EmbeddingSet {
            input: init_input(n_inputs, dim, rng),
            output: Matrix::zeros(n_outputs, dim),
            input_kind: input_kind.to_string(),
            output_kind: output_kind.to_string(),
        }
    }

    pub fn new(input: Matrix, output: Matrix, input_kind: &str, output_kind: &str) -> Result<Self> {
        if input.cols() != output.cols() {
            return Err(Error::Dimension {
                expected: input.cols(),
                actual: output.cols(),
            });
        }
        Ok(EmbeddingSet {
            input,
            output,
            input_kind: input_kind.to_string(),
            output_kind: output_kind.to_string(),
        })
    }

    pub fn dim(&self) -> usize {
        self.input.cols()
    }

    /// `softmax(output . input[i])` for every input `i`.
    pub fn conditionals(&self) -> Result<Matrix> {
        softmax_rows(&self.input, &self.output)
    }
}

pub(crate) fn init_input<R: Rng + ?Sized>(rows: usize, dim: usize, rng: &mut R) -> Matrix {
    let half = 0.5 / dim as f64;
    let data = (0..rows * dim).map(|_| rng.random_range(-half..half)).collect();
    Matrix::from_vec(rows, dim, data).expect("sized")
}

/// Row `i` of the result is the softmax over outputs of `output . input[i]`.
pub fn softmax_rows(input: &Matrix, output: &Matrix) -> Result<Matrix> {
    if input.cols() != output.cols() {
        return Err(Error::Dimension {
            expected: input.cols(),
            actual: output.cols(),
        });
    }
    if !input.is_finite() || !output.is_finite() {
        return Err(Error::numerical("embedding contains non-finite values"));
    }
    let mut out = Matrix::zeros(input.rows(), output.rows());
    let mut logits = vec![0.0; output.rows()];
    for i in 0..input.rows() {
        let v = input.row(i);
        for (l, u) in logits.iter_mut().zip(output.iter_rows()) {
            *l = dot(u, v);
        }
        softmax_into(&logits, out.row_mut(i));
    }
    Ok(out)
}

/// Unit-length document vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct DocEmbeddings {
    pub vectors: Matrix,
    /// Documents with no tokens; their rows are zero.
    pub empty_docs: Vec<usize>,
}

impl DocEmbeddings {
    pub fn dim(&self) -> usize {
        self.vectors.cols()
    }

    /// Normalizes each row to unit length; zero rows are recorded as empty.
    pub(crate) fn from_sums(mut vectors: Matrix) -> Self {
        let mut empty_docs = Vec::new();
        for d in 0..vectors.rows() {
            let n = norm(vectors.row(d));
            if n > 0.0 {
                vectors.row_mut(d).iter_mut().for_each(|x| *x /= n);
            } else {
                empty_docs.push(d);
            }
        }
        if !empty_docs.is_empty() {
            log::warn!("{} empty documents got zero vectors", empty_docs.len());
        }
        DocEmbeddings {
            vectors,
            empty_docs,
        }
    }
}

/// `v_d = normalize(sum_i normalize(topic_vectors[z_di]))` for each document's
/// assignment slice.
pub fn doc_embeddings_from_assignments<'a, I>(assignments: I, topic_vectors: &Matrix) -> Result<DocEmbeddings>
where
    I: IntoIterator<Item = &'a [usize]>,
{
    let dim = topic_vectors.cols();
    let mut unit = topic_vectors.clone();
    let mut zero_norm = vec![false; unit.rows()];
    for k in 0..unit.rows() {
        let n = norm(unit.row(k));
        if n > 0.0 && n.is_finite() {
            unit.row_mut(k).iter_mut().for_each(|x| *x /= n);
        } else {
            zero_norm[k] = true;
        }
    }

    let mut sums: Vec<f64> = Vec::new();
    let mut rows = 0;
    for z in assignments {
        let start = sums.len();
        sums.resize(start + dim, 0.0);
        let acc = &mut sums[start..];
        for &k in z {
            if k >= unit.rows() {
                return Err(Error::data(format!("assignment {k} has no topic vector")));
            }
            if zero_norm[k] {
                return Err(Error::numerical(format!("topic {k} has a zero-norm vector")));
            }
            acc.iter_mut().zip(unit.row(k)).for_each(|(a, x)| *a += x);
        }
        rows += 1;
    }
    Ok(DocEmbeddings::from_sums(Matrix::from_vec(rows, dim, sums)?))
}
