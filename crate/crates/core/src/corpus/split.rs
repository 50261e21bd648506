use rand::seq::SliceRandom;

use super::{Corpus, Document, Vocabulary};
use crate::error::{Error, Result};
use crate::sampling::seeded_rng;

/// Random train/test partition with `round(ratio * D)` training documents.
///
/// The returned corpora share a vocabulary built from the training half only;
/// test tokens outside it are dropped. Document order within each half
/// follows the original corpus.
pub fn split(corpus: &Corpus, ratio: f64, seed: u64) -> Result<(Corpus, Corpus)> {
    if !(ratio > 0.0 && ratio < 1.0) {
        return Err(Error::config(format!("split ratio {ratio} not in (0, 1)")));
    }
    let d = corpus.num_docs();
    if d < 2 {
        return Err(Error::data("cannot split a corpus with fewer than 2 documents"));
    }
    let n_train = ((ratio * d as f64).round() as usize).clamp(1, d - 1);

    let mut order: Vec<usize> = (0..d).collect();
    order.shuffle(&mut seeded_rng(seed));
    let mut train_ids = order[..n_train].to_vec();
    let mut test_ids = order[n_train..].to_vec();
    train_ids.sort_unstable();
    test_ids.sort_unstable();

    if corpus.has_labels() {
        let mut seen = vec![false; corpus.num_classes()];
        for &i in &train_ids {
            if let Some(l) = corpus.documents[i].label {
                seen[l] = true;
            }
        }
        for doc in &corpus.documents {
            if let Some(l) = doc.label {
                if !seen[l] {
                    return Err(Error::data(format!(
                        "class {} has no training documents after the split",
                        corpus.class_names.as_ref().map_or(l.to_string(), |n| n[l].clone())
                    )));
                }
            }
        }
    }

    let mut vocabulary = Vocabulary::new();
    let mut remap: Vec<Option<usize>> = vec![None; corpus.num_words()];
    let train_docs: Vec<Document> = train_ids
        .iter()
        .map(|&i| {
            let doc = &corpus.documents[i];
            let tokens = doc
                .tokens
                .iter()
                .map(|&t| {
                    *remap[t].get_or_insert_with(|| {
                        vocabulary.insert(corpus.vocabulary.word(t).to_string())
                    })
                })
                .collect();
            Document {
                tokens,
                ..doc.clone()
            }
        })
        .collect();
    let test_docs: Vec<Document> = test_ids
        .iter()
        .map(|&i| {
            let doc = &corpus.documents[i];
            Document {
                tokens: doc.tokens.iter().filter_map(|&t| remap[t]).collect(),
                ..doc.clone()
            }
        })
        .collect();

    let train = Corpus::new(
        vocabulary.clone(),
        train_docs,
        corpus.authors.clone(),
        corpus.class_names.clone(),
    )?;
    // The test half may lose every token to the shared vocabulary; it is
    // still a valid feature source, so it skips the non-empty check.
    let test = Corpus {
        vocabulary,
        documents: test_docs,
        authors: corpus.authors.clone(),
        class_names: corpus.class_names.clone(),
    };
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::ingest_texts;

    fn labeled() -> Corpus {
        let texts: Vec<String> = (0..10)
            .map(|i| format!("common w{i} x{} shared{}", i % 3, i % 2))
            .collect();
        let labels = (0..10).map(|i| format!("c{}", i % 2)).collect();
        ingest_texts(&texts, None, Some(labels), &Default::default()).unwrap()
    }

    #[test]
    fn half_split_is_a_disjoint_partition() {
        let c = labeled();
        let (train, test) = split(&c, 0.5, 11).unwrap();
        assert_eq!((train.num_docs(), test.num_docs()), (5, 5));
        // Every document's unique "w{i}" token identifies it.
        let ident = |corpus: &Corpus, doc: &Document| -> Option<String> {
            doc.tokens
                .iter()
                .map(|&t| corpus.vocabulary.word(t).to_string())
                .find(|w| w.starts_with('w'))
        };
        let train_ids: Vec<String> =
            train.documents.iter().filter_map(|d| ident(&train, d)).collect();
        assert_eq!(train_ids.len(), 5);
        for doc in &test.documents {
            if let Some(id) = ident(&test, doc) {
                assert!(!train_ids.contains(&id));
            }
        }
    }

    #[test]
    fn same_seed_same_split() {
        let c = labeled();
        assert_eq!(split(&c, 0.5, 3).unwrap(), split(&c, 0.5, 3).unwrap());
    }

    #[test]
    fn unseen_test_words_are_dropped() {
        let c = labeled();
        let (train, test) = split(&c, 0.5, 5).unwrap();
        // Recount: every original test token whose word is in the train
        // vocabulary survives, all others vanish.
        let (_, test_ids): (Vec<usize>, Vec<usize>) = {
            let mut order: Vec<usize> = (0..c.num_docs()).collect();
            order.shuffle(&mut seeded_rng(5));
            let mut tr = order[..5].to_vec();
            let mut te = order[5..].to_vec();
            tr.sort_unstable();
            te.sort_unstable();
            (tr, te)
        };
        let expected: usize = test_ids
            .iter()
            .flat_map(|&i| &c.documents[i].tokens)
            .filter(|&&t| train.vocabulary.id(c.vocabulary.word(t)).is_some())
            .count();
        assert_eq!(test.num_tokens(), expected);
        let original: usize = test_ids.iter().map(|&i| c.documents[i].len()).sum();
        assert!(expected < original, "fixture should contain unseen words");
        assert_eq!(test.vocabulary, train.vocabulary);
    }

    #[test]
    fn rejects_bad_ratio_and_missing_class() {
        let c = labeled();
        assert!(split(&c, 0.0, 1).is_err());
        assert!(split(&c, 1.0, 1).is_err());
        let texts: Vec<String> = (0..4).map(|i| format!("t{i}")).collect();
        let labels = vec!["a".into(), "a".into(), "a".into(), "rare".into()];
        let c = ingest_texts(&texts, None, Some(labels), &Default::default()).unwrap();
        // With one training document at most one class can be covered.
        assert!((0..20).any(|seed| split(&c, 0.25, seed).is_err()));
    }
}
