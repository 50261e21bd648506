use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Sorted posting lists: the documents containing each word.
#[derive(Debug, Clone)]
pub struct DocIndex {
    postings: Vec<Vec<u32>>,
}

impl DocIndex {
    /// `doc_word_sets[d]` lists the words of document `d`; duplicates are fine.
    pub fn new(doc_word_sets: &[Vec<usize>], num_words: usize) -> Self {
        let mut postings = vec![Vec::new(); num_words];
        for (d, words) in doc_word_sets.iter().enumerate() {
            for &w in words {
                let list: &mut Vec<u32> = &mut postings[w];
                if list.last() != Some(&(d as u32)) {
                    list.push(d as u32);
                }
            }
        }
        DocIndex { postings }
    }

    pub fn from_corpus(corpus: &Corpus) -> Self {
        DocIndex::new(&corpus.doc_word_sets(), corpus.num_words())
    }

    pub fn doc_frequency(&self, w: usize) -> usize {
        self.postings.get(w).map_or(0, Vec::len)
    }

    pub fn co_frequency(&self, a: usize, b: usize) -> usize {
        let (Some(x), Some(y)) = (self.postings.get(a), self.postings.get(b)) else {
            return 0;
        };
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < x.len() && j < y.len() {
            match x[i].cmp(&y[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    /// `sum_{m>l} ln((D(w_m, w_l) + 1) / D(w_l))` over `top` in the given
    /// order. Pairs whose `w_l` occurs in no document are skipped.
    pub fn umass(&self, top: &[usize]) -> Result<f64> {
        if top.len() < 2 {
            return Err(Error::config("coherence needs at least two top words"));
        }
        let mut score = 0.0;
        let mut skipped = 0;
        for m in 1..top.len() {
            for l in 0..m {
                let dl = self.doc_frequency(top[l]);
                if dl == 0 {
                    skipped += 1;
                    continue;
                }
                let co = self.co_frequency(top[m], top[l]);
                score += ((co + 1) as f64 / dl as f64).ln();
            }
        }
        if skipped > 0 {
            log::warn!("skipped {skipped} coherence pairs whose word occurs in no document");
        }
        Ok(score)
    }
}

/// UMass coherence of one topic's top words.
pub fn umass_coherence(top: &[usize], doc_word_sets: &[Vec<usize>]) -> Result<f64> {
    let num_words = top.iter().max().map_or(0, |&w| w + 1);
    let mut sets = Vec::with_capacity(doc_word_sets.len());
    for words in doc_word_sets {
        let mut s: Vec<usize> = words.iter().copied().filter(|&w| w < num_words).collect();
        s.sort_unstable();
        s.dedup();
        sets.push(s);
    }
    DocIndex::new(&sets, num_words).umass(top)
}

/// The `t` most probable ids of `row`, ties broken by ascending id.
pub fn top_words(row: &[f64], t: usize) -> Vec<usize> {
    let mut ids: Vec<usize> = (0..row.len()).collect();
    ids.sort_by(|&a, &b| row[b].total_cmp(&row[a]).then(a.cmp(&b)));
    ids.truncate(t);
    ids
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TopicCoherence {
    pub topic: usize,
    pub score: f64,
    pub top_words: Vec<usize>,
    /// Tokens assigned to the topic, when assignments were supplied.
    pub assigned: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherenceReport {
    pub per_topic: Vec<TopicCoherence>,
    pub mean: f64,
    pub top_n: usize,
}

impl CoherenceReport {
    /// Columns `topic,score,assigned,top_words`; words space-separated.
    pub fn to_csv(&self, corpus: &Corpus) -> String {
        let mut out = String::from("topic,score,assigned,top_words\n");
        for t in &self.per_topic {
            let words: Vec<&str> = t.top_words.iter().map(|&w| corpus.vocabulary.word(w)).collect();
            let assigned = t.assigned.map(|a| a.to_string()).unwrap_or_default();
            out.push_str(&format!("{},{},{},{}\n", t.topic, t.score, assigned, words.join(" ")));
        }
        out
    }
}

/// Coherence of every row of `phi` against the corpus's document counts.
pub fn coherence_report(
    phi: &Matrix,
    corpus: &Corpus,
    t: usize,
    topic_sizes: Option<&[usize]>,
) -> Result<CoherenceReport> {
    if phi.cols() != corpus.num_words() {
        return Err(Error::Dimension {
            expected: corpus.num_words(),
            actual: phi.cols(),
        });
    }
    if t > phi.cols() {
        return Err(Error::config(format!(
            "asked for {t} top words from a {}-word vocabulary",
            phi.cols()
        )));
    }
    if let Some(sizes) = topic_sizes {
        if sizes.len() != phi.rows() {
            return Err(Error::Dimension {
                expected: phi.rows(),
                actual: sizes.len(),
            });
        }
    }
    if phi.rows() == 0 {
        return Err(Error::data("no topics to score"));
    }
    let index = DocIndex::from_corpus(corpus);
    let per_topic = phi
        .iter_rows()
        .enumerate()
        .map(|(k, row)| {
            let top = top_words(row, t);
            Ok(TopicCoherence {
                topic: k,
                score: index.umass(&top)?,
                top_words: top,
                assigned: topic_sizes.map(|s| s[k]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean = per_topic.iter().map(|t| t.score).sum::<f64>() / per_topic.len() as f64;
    Ok(CoherenceReport {
        per_topic,
        mean,
        top_n: t,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    use crate::sampling::seeded_rng;

    fn brute_force(top: &[usize], docs: &[Vec<usize>]) -> f64 {
        let has = |d: &Vec<usize>, w: usize| d.contains(&w);
        let mut s = 0.0;
        for m in 1..top.len() {
            for l in 0..m {
                let dl = docs.iter().filter(|d| has(d, top[l])).count();
                let co = docs.iter().filter(|d| has(d, top[l]) && has(d, top[m])).count();
                if dl > 0 {
                    s += ((co + 1) as f64 / dl as f64).ln();
                }
            }
        }
        s
    }

    #[test]
    fn always_together() {
        let docs = vec![vec![0, 1]; 4];
        assert!((umass_coherence(&[0, 1], &docs).unwrap() - (5.0f64 / 4.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn never_together() {
        let docs = vec![vec![0], vec![0], vec![0], vec![0], vec![1]];
        assert!((umass_coherence(&[1, 0], &docs).unwrap() - 1.0f64.ln()).abs() < 1e-15);
        assert!((umass_coherence(&[0, 1], &docs).unwrap() - 0.25f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn matches_brute_force() {
        let mut rng = seeded_rng(11);
        let docs: Vec<Vec<usize>> = (0..10)
            .map(|_| (0..8).map(|_| rng.random_range(0..12)).collect())
            .collect();
        for _ in 0..5 {
            let mut top: Vec<usize> = (0..12).collect();
            for i in 0..6 {
                let j = rng.random_range(i..12);
                top.swap(i, j);
            }
            top.truncate(6);
            assert_eq!(umass_coherence(&top, &docs).unwrap(), brute_force(&top, &docs));
        }
    }

    #[test]
    fn order_and_duplicates_do_not_matter() {
        let docs = vec![vec![0, 1, 1, 2], vec![2, 2], vec![0, 3]];
        let shuffled = vec![vec![0, 3], vec![2], vec![2, 1, 0]];
        let top = [2, 0, 1, 3];
        assert_eq!(umass_coherence(&top, &docs).unwrap(), umass_coherence(&top, &shuffled).unwrap());
    }

    #[test]
    fn unseen_word_is_skipped() {
        let docs = vec![vec![0], vec![0, 1]];
        let s = umass_coherence(&[5, 0, 1], &docs).unwrap();
        assert_eq!(s, brute_force(&[5, 0, 1], &docs));
    }

    #[test]
    fn needs_two_words() {
        assert!(umass_coherence(&[0], &[vec![0]]).is_err());
    }

    #[test]
    fn top_words_break_ties_by_id() {
        assert_eq!(top_words(&[0.2, 0.4, 0.2, 0.1, 0.4], 4), vec![1, 4, 0, 2]);
    }

    #[test]
    fn report_mean_and_identical_rows() {
        let c = Corpus::from_token_ids(4, vec![vec![0, 1], vec![1, 2], vec![2, 3, 0]]).unwrap();
        let row = vec![0.4, 0.3, 0.2, 0.1];
        let phi = Matrix::from_rows(&[row.clone(), row.clone(), row]).unwrap();
        let r = coherence_report(&phi, &c, 3, Some(&[1, 2, 3])).unwrap();
        let s = r.per_topic[0].score;
        assert!(r.per_topic.iter().all(|t| t.score == s));
        assert!((r.mean - s).abs() < 1e-12);
        assert!(coherence_report(&phi, &c, 5, None).is_err());
        assert!(r.to_csv(&c).starts_with("topic,score,assigned,top_words\n0,"));
    }
}
