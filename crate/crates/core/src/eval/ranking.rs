use serde::Serialize;

use crate::corpus::{tfidf, Corpus, Document, TfIdfMatrix};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Symmetric KL divergence `sum_t p_t ln(p_t/q_t) + q_t ln(q_t/p_t)`.
/// Both arguments must be strictly positive.
pub fn skl(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::Dimension {
            expected: p.len(),
            actual: q.len(),
        });
    }
    if p.iter().chain(q).any(|&x| !(x > 0.0 && x.is_finite())) {
        return Err(Error::numerical("symmetric KL needs strictly positive distributions"));
    }
    Ok(p.iter().zip(q).map(|(&a, &b)| (a - b) * (a / b).ln()).sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryRank {
    pub author: usize,
    /// 1-based position of the best-ranked coauthor.
    pub rank: usize,
    pub reciprocal_rank: f64,
    /// Every other author with its distance, nearest first.
    pub ranked: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingResult {
    pub queries: Vec<QueryRank>,
    pub mrr: f64,
}

impl RankingResult {
    /// Columns `author,rank,reciprocal_rank,nearest`.
    pub fn to_csv(&self, names: &[String]) -> String {
        let mut out = String::from("author,rank,reciprocal_rank,nearest\n");
        for q in &self.queries {
            let nearest = q.ranked.first().map_or("", |&(a, _)| names[a].as_str());
            out.push_str(&format!(
                "{},{},{},{}\n",
                names[q.author], q.rank, q.reciprocal_rank, nearest
            ));
        }
        out
    }
}

/// Ranks all other authors for each eligible query by ascending `distance`,
/// ties by id, and scores the best-placed coauthor.
pub fn rank_by_distance<F>(
    num_authors: usize,
    coauthors: &[Vec<usize>],
    eligible: &[bool],
    distance: F,
) -> Result<RankingResult>
where
    F: Fn(usize, usize) -> f64,
{
    if coauthors.len() != num_authors || eligible.len() != num_authors {
        return Err(Error::Dimension {
            expected: num_authors,
            actual: coauthors.len().min(eligible.len()),
        });
    }
    let mut queries = Vec::new();
    for q in (0..num_authors).filter(|&q| eligible[q]) {
        if coauthors[q].iter().all(|&c| c == q) {
            return Err(Error::data(format!("query author {q} has no coauthors")));
        }
        let mut ranked: Vec<(usize, f64)> = (0..num_authors)
            .filter(|&a| a != q)
            .map(|a| (a, distance(q, a)))
            .collect();
        ranked.sort_by(|x, y| x.1.total_cmp(&y.1).then(x.0.cmp(&y.0)));
        let rank = 1 + ranked
            .iter()
            .position(|(a, _)| coauthors[q].contains(a))
            .expect("a coauthor is among the candidates");
        queries.push(QueryRank {
            author: q,
            rank,
            reciprocal_rank: 1.0 / rank as f64,
            ranked,
        });
    }
    if queries.is_empty() {
        return Err(Error::data("no eligible query authors"));
    }
    let mrr = queries.iter().map(|q| q.reciprocal_rank).sum::<f64>() / queries.len() as f64;
    Ok(RankingResult { queries, mrr })
}

/// Coauthor retrieval over author-topic rows with symmetric KL distance.
pub fn coauthor_mrr(
    author_topics: &Matrix,
    coauthors: &[Vec<usize>],
    eligible: &[bool],
) -> Result<RankingResult> {
    for row in author_topics.iter_rows() {
        skl(row, row)?;
    }
    rank_by_distance(author_topics.rows(), coauthors, eligible, |i, j| {
        skl(author_topics.row(i), author_topics.row(j)).expect("rows checked positive")
    })
}

/// Sorted coauthor ids per author; an author is never their own coauthor.
pub fn coauthor_sets(corpus: &Corpus) -> Vec<Vec<usize>> {
    let mut sets = vec![Vec::new(); corpus.num_authors()];
    for doc in &corpus.documents {
        let Some(authors) = &doc.authors else { continue };
        for &a in authors {
            sets[a].extend(authors.iter().copied().filter(|&b| b != a));
        }
    }
    for s in &mut sets {
        s.sort_unstable();
        s.dedup();
    }
    sets
}

pub fn author_paper_counts(corpus: &Corpus) -> Vec<usize> {
    let mut counts = vec![0; corpus.num_authors()];
    for doc in &corpus.documents {
        for &a in doc.authors.iter().flatten() {
            counts[a] += 1;
        }
    }
    counts
}

/// Authors with at least `min_papers` papers and at least one coauthor.
pub fn eligible_authors(corpus: &Corpus, min_papers: usize) -> Vec<bool> {
    let sets = coauthor_sets(corpus);
    author_paper_counts(corpus)
        .into_iter()
        .zip(&sets)
        .map(|(n, s)| n >= min_papers && !s.is_empty())
        .collect()
}

/// tf-idf author vectors: each author's papers concatenated into one
/// pseudo-document, weighted against the other authors' pseudo-documents.
/// Rows are unit length, so cosine distance is `1 - dot`.
pub fn author_tfidf(corpus: &Corpus) -> Result<TfIdfMatrix> {
    if !corpus.has_authors() {
        return Err(Error::data("corpus has no author lists"));
    }
    let mut tokens = vec![Vec::new(); corpus.num_authors()];
    for doc in &corpus.documents {
        for &a in doc.authors.iter().flatten() {
            tokens[a].extend_from_slice(&doc.tokens);
        }
    }
    let pseudo = Corpus {
        vocabulary: corpus.vocabulary.clone(),
        documents: tokens.into_iter().map(Document::new).collect(),
        authors: None,
        class_names: None,
    };
    Ok(tfidf(&pseudo))
}

impl TfIdfMatrix {
    /// `1 - cosine` between two unit rows; an empty row is at distance 1.
    pub fn cosine_distance(&self, a: usize, b: usize) -> f64 {
        let (x, y) = (&self.rows[a], &self.rows[b]);
        let (mut i, mut j, mut s) = (0, 0, 0.0);
        while i < x.len() && j < y.len() {
            match x[i].0.cmp(&y[j].0) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    s += x[i].1 * y[j].1;
                    i += 1;
                    j += 1;
                }
            }
        }
        1.0 - s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Vocabulary;

    #[test]
    fn skl_hand_value() {
        let v = skl(&[0.8, 0.2], &[0.2, 0.8]).unwrap();
        assert!((v - 1.2 * 4f64.ln()).abs() < 1e-12);
        assert_eq!(skl(&[0.3, 0.7], &[0.3, 0.7]).unwrap(), 0.0);
        assert!(skl(&[1.0, 0.0], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn skl_is_symmetric() {
        let p = [0.1, 0.6, 0.3];
        let q = [0.25, 0.25, 0.5];
        assert!((skl(&p, &q).unwrap() - skl(&q, &p).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn perfect_and_second_place() {
        // 1-D positions: 0 and 1 are mutual nearest coauthors.
        let pos = [0.0f64, 1.0, 5.0, 5.5];
        let d = |i: usize, j: usize| (pos[i] - pos[j]).abs();
        let all = vec![true; 4];
        let perfect = rank_by_distance(4, &[vec![1], vec![0], vec![3], vec![2]], &all, d).unwrap();
        assert_eq!(perfect.mrr, 1.0);
        let second = rank_by_distance(4, &[vec![2], vec![2], vec![0], vec![1]], &[true, false, false, false], d)
            .unwrap();
        assert_eq!(second.mrr, 0.5);
    }

    #[test]
    fn monotone_transform_keeps_ranks() {
        let pos = [0.0f64, 2.0, 3.0, 7.0];
        let co = vec![vec![2], vec![3], vec![0], vec![1]];
        let all = vec![true; 4];
        let a = rank_by_distance(4, &co, &all, |i, j| (pos[i] - pos[j]).abs()).unwrap();
        let b = rank_by_distance(4, &co, &all, |i, j| (pos[i] - pos[j]).abs().exp()).unwrap();
        assert_eq!(a.mrr, b.mrr);
    }

    #[test]
    fn empty_coauthor_set_is_an_error() {
        assert!(rank_by_distance(2, &[vec![], vec![0]], &[true, true], |_, _| 0.0).is_err());
    }

    fn authored() -> Corpus {
        let vocab = Vocabulary::from_words(["a", "b", "c"]).unwrap();
        let docs = vec![
            Document::new(vec![0, 0, 1]).with_authors(vec![0, 1]),
            Document::new(vec![2]).with_authors(vec![1]),
            Document::new(vec![2, 1]).with_authors(vec![2]),
        ];
        Corpus::new(vocab, docs, Some(vec!["x".into(), "y".into(), "z".into()]), None).unwrap()
    }

    #[test]
    fn coauthors_and_eligibility() {
        let c = authored();
        assert_eq!(coauthor_sets(&c), vec![vec![1], vec![0], vec![]]);
        assert_eq!(author_paper_counts(&c), vec![1, 2, 1]);
        assert_eq!(eligible_authors(&c, 2), vec![false, true, false]);
        assert_eq!(eligible_authors(&c, 1), vec![true, true, false]);
    }

    #[test]
    fn author_tfidf_rows_are_unit_or_empty() {
        let m = author_tfidf(&authored()).unwrap();
        for r in 0..3 {
            let n: f64 = m.rows[r].iter().map(|(_, v)| v * v).sum();
            assert!(n == 0.0 || (n - 1.0).abs() < 1e-12);
            assert!(m.cosine_distance(r, r) <= 1.0);
        }
    }
}
