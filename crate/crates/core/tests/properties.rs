use nea_core::corpus::{ingest_texts, split, tfidf};
use nea_core::matrix::{norm, softmax_into};
use nea_core::topic_models::sgtm_mle;
use nea_core::{Corpus, TokenizerConfig};
use proptest::prelude::*;

fn texts() -> impl Strategy<Value = Vec<String>> {
    let word = prop::sample::select(vec!["alpha", "beta", "Gamma", "delta", "eps", "zeta", "eta", "THETA"]);
    let doc = prop::collection::vec(word, 1..12).prop_map(|w| w.join(" "));
    prop::collection::vec(doc, 2..20)
}

fn token_docs() -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0usize..15, 0..25), 2..15)
}

fn anchor(n: usize) -> String {
    vec!["anchor"; n].join(" ")
}

proptest! {
    #[test]
    fn ingest_is_idempotent(texts in texts(), min_count in 1usize..3) {
        let tok = TokenizerConfig { min_count, ..Default::default() };
        let Ok(first) = ingest_texts(&texts, None, None, &tok) else {
            return Ok(());
        };
        let lines: Vec<String> = first.to_text().lines().map(str::to_string).collect();
        let second = ingest_texts(&lines, None, None, &tok).unwrap();
        prop_assert_eq!(first.vocabulary.words(), second.vocabulary.words());
        let ids = |c: &Corpus| c.documents.iter().map(|d| d.tokens.clone()).collect::<Vec<_>>();
        prop_assert_eq!(ids(&first), ids(&second));
        prop_assert_eq!(first.word_counts(), second.word_counts());
    }

    #[test]
    fn tfidf_rows_are_unit_or_empty(docs in token_docs()) {
        let c = Corpus::from_token_ids(15, docs).unwrap();
        for row in &tfidf(&c).rows {
            let n = row.iter().map(|&(_, v)| v * v).sum::<f64>().sqrt();
            prop_assert!(row.is_empty() || (n - 1.0).abs() < 1e-12, "norm {}", n);
        }
    }

    #[test]
    fn split_is_a_partition(n in 2usize..30, ratio in 0.05f64..0.95, seed in any::<u64>()) {
        // Document i is identified by its i + 1 copies of the shared word.
        let texts: Vec<String> = (0..n).map(|i| format!("{} w{}", anchor(i + 1), i % 4)).collect();
        let c = ingest_texts(&texts, None, None, &TokenizerConfig::default()).unwrap();
        let (train, test) = split(&c, ratio, seed).unwrap();
        let id = |corpus: &Corpus, d: usize| {
            let a = corpus.vocabulary.id("anchor").unwrap();
            corpus.documents[d].tokens.iter().filter(|&&t| t == a).count() - 1
        };
        let mut seen: Vec<usize> = (0..train.num_docs()).map(|d| id(&train, d)).collect();
        seen.extend((0..test.num_docs()).map(|d| id(&test, d)));
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(split(&c, ratio, seed).unwrap(), (train, test));
    }

    #[test]
    fn softmax_is_shift_invariant(logits in prop::collection::vec(-30.0f64..30.0, 1..12), shift in -100.0f64..100.0) {
        let mut a = vec![0.0; logits.len()];
        let mut b = vec![0.0; logits.len()];
        softmax_into(&logits, &mut a);
        let shifted: Vec<f64> = logits.iter().map(|l| l + shift).collect();
        softmax_into(&shifted, &mut b);
        prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn sgtm_rows_are_stochastic_or_undefined(docs in token_docs(), window in 1usize..4) {
        let c = Corpus::from_token_ids(15, docs).unwrap();
        let Ok(t) = sgtm_mle(&c, window) else {
            return Ok(());
        };
        for (w, row) in t.table.iter_rows().enumerate() {
            let s: f64 = row.iter().sum();
            if t.defined[w] {
                prop_assert!((s - 1.0).abs() < 1e-9);
            } else {
                prop_assert_eq!(norm(row), 0.0);
            }
        }
    }
}
