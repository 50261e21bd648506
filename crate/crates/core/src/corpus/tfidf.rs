use super::Corpus;
use crate::matrix::Matrix;

/// Inverse document frequencies fitted on one corpus, applicable to any
/// corpus sharing its vocabulary.
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdf {
    idf: Vec<f64>,
}

/// Sparse tf-idf rows, each L2-normalized (or empty).
#[derive(Debug, Clone, PartialEq)]
pub struct TfIdfMatrix {
    pub num_words: usize,
    /// `(word id, weight)` pairs sorted by word id, zero weights omitted.
    pub rows: Vec<Vec<(usize, f64)>>,
}

impl TfIdf {
    /// `idf(w) = ln(D / df(w))`; words absent from the corpus get 0.
    pub fn fit(corpus: &Corpus) -> Self {
        let d = corpus.num_docs() as f64;
        let idf = corpus
            .document_frequencies()
            .into_iter()
            .map(|df| if df == 0 { 0.0 } else { (d / df as f64).ln() })
            .collect();
        TfIdf { idf }
    }

    pub fn idf(&self) -> &[f64] {
        &self.idf
    }

    pub fn transform(&self, corpus: &Corpus) -> TfIdfMatrix {
        let rows = corpus
            .documents
            .iter()
            .map(|doc| {
                let mut tokens = doc.tokens.clone();
                tokens.sort_unstable();
                let mut row: Vec<(usize, f64)> = Vec::new();
                for chunk in tokens.chunk_by(|a, b| a == b) {
                    let w = chunk[0];
                    let weight = chunk.len() as f64 * self.idf.get(w).copied().unwrap_or(0.0);
                    if weight > 0.0 {
                        row.push((w, weight));
                    }
                }
                let norm = row.iter().map(|(_, v)| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    row.iter_mut().for_each(|(_, v)| *v /= norm);
                }
                row
            })
            .collect();
        TfIdfMatrix {
            num_words: self.idf.len(),
            rows,
        }
    }
}

/// tf-idf of a corpus against its own document frequencies.
pub fn tfidf(corpus: &Corpus) -> TfIdfMatrix {
    TfIdf::fit(corpus).transform(corpus)
}

impl TfIdfMatrix {
    pub fn get(&self, doc: usize, word: usize) -> f64 {
        let row = &self.rows[doc];
        row.binary_search_by_key(&word, |&(w, _)| w)
            .map_or(0.0, |i| row[i].1)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.rows.len(), self.num_words);
        for (d, row) in self.rows.iter().enumerate() {
            for &(w, v) in row {
                m.set(d, w, v);
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Dense tf-idf by direct enumeration over (document, word) cells.
    fn brute_force(corpus: &Corpus) -> Vec<Vec<f64>> {
        let d = corpus.num_docs();
        let w = corpus.num_words();
        let mut out = vec![vec![0.0; w]; d];
        for word in 0..w {
            let df = corpus
                .documents
                .iter()
                .filter(|doc| doc.tokens.contains(&word))
                .count();
            for (i, doc) in corpus.documents.iter().enumerate() {
                let tf = doc.tokens.iter().filter(|&&t| t == word).count() as f64;
                if df > 0 {
                    out[i][word] = tf * (d as f64 / df as f64).ln();
                }
            }
        }
        for row in &mut out {
            let n: f64 = row.iter().map(|v| v * v).sum::<f64>().sqrt();
            if n > 0.0 {
                row.iter_mut().for_each(|v| *v /= n);
            }
        }
        out
    }

    fn toy() -> Corpus {
        Corpus::from_token_ids(
            6,
            vec![
                vec![0, 1, 1, 2],
                vec![0, 3, 3, 3],
                vec![0, 1, 4],
                vec![0, 5, 5, 2, 2],
                vec![0, 4, 1, 3],
            ],
        )
        .unwrap()
    }

    #[test]
    fn word_in_every_document_has_zero_weight() {
        let m = tfidf(&toy());
        assert!((0..5).all(|d| m.get(d, 0) == 0.0));
    }

    #[test]
    fn single_document_gives_zero_matrix() {
        let c = Corpus::from_token_ids(3, vec![vec![0, 1, 2, 2]]).unwrap();
        let m = tfidf(&c);
        assert!(m.rows[0].is_empty());
        assert!(m.to_dense().as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn matches_brute_force_enumeration() {
        let c = toy();
        let dense = tfidf(&c).to_dense();
        let expected = brute_force(&c);
        for (d, row) in expected.iter().enumerate() {
            for (w, v) in row.iter().enumerate() {
                assert!((dense.get(d, w) - v).abs() < 1e-12, "({d},{w})");
            }
        }
    }

    #[test]
    fn rows_are_unit_or_zero() {
        let m = tfidf(&toy());
        for row in &m.rows {
            let n: f64 = row.iter().map(|(_, v)| v * v).sum();
            assert!(row.is_empty() || (n - 1.0).abs() < 1e-12);
            assert!(row.iter().all(|&(_, v)| v > 0.0));
        }
    }
}
