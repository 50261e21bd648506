//! Vocabulary, documents and bag-of-words corpora.

mod ingest;
mod io;
mod split;
mod tfidf;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ingest::{ingest, ingest_texts, IngestOptions};
pub use io::{load_corpus, save_corpus, CORPUS_KIND};
pub use split::split;
pub use tfidf::{tfidf, TfIdf, TfIdfMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TokenizerConfig {
    pub lowercase: bool,
    /// Words with fewer total occurrences in the corpus are dropped.
    pub min_count: usize,
    pub stopwords: Vec<String>,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        TokenizerConfig {
            lowercase: true,
            min_count: 1,
            stopwords: Vec::new(),
        }
    }
}

impl TokenizerConfig {
    /// Splits on runs of non-alphanumeric characters, lowercasing if asked.
    /// Stopwords are removed here; `min_count` is applied corpus-wide later.
    pub fn tokenize<'a>(&'a self, text: &'a str) -> impl Iterator<Item = String> + 'a {
        text.split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
            .map(move |t| {
                if self.lowercase {
                    t.to_lowercase()
                } else {
                    t.to_string()
                }
            })
            .filter(move |t| !self.stopwords.iter().any(|s| s == t))
    }
}

/// Bijection between word strings and dense ids `0..W`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_words<I, S>(words: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::new();
        for w in words {
            let w = w.into();
            if vocab.index.contains_key(&w) {
                return Err(Error::data(format!("duplicate vocabulary entry `{w}`")));
            }
            vocab.insert(w);
        }
        Ok(vocab)
    }

    /// Vocabulary of placeholder names `w0..w{n-1}`, for synthetic corpora.
    pub fn synthetic(n: usize) -> Self {
        Vocabulary::from_words((0..n).map(|i| format!("w{i}"))).expect("names are distinct")
    }

    /// Returns the id of `word`, adding it if new.
    pub fn insert(&mut self, word: String) -> usize {
        if let Some(&id) = self.index.get(&word) {
            return id;
        }
        let id = self.words.len();
        self.index.insert(word.clone(), id);
        self.words.push(word);
        id
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub tokens: Vec<usize>,
    pub authors: Option<Vec<usize>>,
    pub label: Option<usize>,
}

impl Document {
    pub fn new(tokens: Vec<usize>) -> Self {
        Document {
            tokens,
            ..Default::default()
        }
    }

    pub fn with_authors(mut self, authors: Vec<usize>) -> Self {
        self.authors = Some(authors);
        self
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    pub vocabulary: Vocabulary,
    pub documents: Vec<Document>,
    pub authors: Option<Vec<String>>,
    pub class_names: Option<Vec<String>>,
}

impl Corpus {
    /// Builds and validates a corpus.
    pub fn new(
        vocabulary: Vocabulary,
        documents: Vec<Document>,
        authors: Option<Vec<String>>,
        class_names: Option<Vec<String>>,
    ) -> Result<Self> {
        let corpus = Corpus {
            vocabulary,
            documents,
            authors,
            class_names,
        };
        corpus.validate()?;
        Ok(corpus)
    }

    /// Corpus over a synthetic vocabulary `w0..w{W-1}` from raw token ids.
    pub fn from_token_ids(num_words: usize, docs: Vec<Vec<usize>>) -> Result<Self> {
        Corpus::new(
            Vocabulary::synthetic(num_words),
            docs.into_iter().map(Document::new).collect(),
            None,
            None,
        )
    }

    pub fn validate(&self) -> Result<()> {
        if self.documents.is_empty() {
            return Err(Error::data("corpus has no documents"));
        }
        if self.num_tokens() == 0 {
            return Err(Error::data("corpus has no tokens"));
        }
        let w = self.num_words();
        let a = self.num_authors();
        let c = self.class_names.as_ref().map_or(usize::MAX, Vec::len);
        for (d, doc) in self.documents.iter().enumerate() {
            if let Some(&bad) = doc.tokens.iter().find(|&&t| t >= w) {
                return Err(Error::data(format!("document {d}: token id {bad} >= W={w}")));
            }
            if let Some(authors) = &doc.authors {
                if let Some(&bad) = authors.iter().find(|&&x| x >= a) {
                    return Err(Error::data(format!("document {d}: author id {bad} >= A={a}")));
                }
            }
            if let Some(label) = doc.label {
                if label >= c {
                    return Err(Error::data(format!("document {d}: label {label} out of range")));
                }
            }
        }
        Ok(())
    }

    pub fn num_words(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn num_docs(&self) -> usize {
        self.documents.len()
    }

    pub fn num_tokens(&self) -> usize {
        self.documents.iter().map(Document::len).sum()
    }

    /// Number of authors `A`: the registry size, or one more than the
    /// largest author id when there is no registry.
    pub fn num_authors(&self) -> usize {
        match &self.authors {
            Some(names) => names.len(),
            None => self
                .documents
                .iter()
                .filter_map(|d| d.authors.as_ref())
                .flatten()
                .map(|&a| a + 1)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn num_classes(&self) -> usize {
        match &self.class_names {
            Some(names) => names.len(),
            None => self
                .documents
                .iter()
                .filter_map(|d| d.label)
                .map(|l| l + 1)
                .max()
                .unwrap_or(0),
        }
    }

    pub fn has_authors(&self) -> bool {
        self.documents.iter().any(|d| d.authors.is_some())
    }

    pub fn has_labels(&self) -> bool {
        self.documents.iter().any(|d| d.label.is_some())
    }

    /// Labels of every document; errors if any document is unlabeled.
    pub fn labels(&self) -> Result<Vec<usize>> {
        self.documents
            .iter()
            .enumerate()
            .map(|(d, doc)| {
                doc.label
                    .ok_or_else(|| Error::data(format!("document {d} has no label")))
            })
            .collect()
    }

    /// Total occurrences of every word.
    pub fn word_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.num_words()];
        for doc in &self.documents {
            for &t in &doc.tokens {
                counts[t] += 1;
            }
        }
        counts
    }

    /// Number of documents containing each word.
    pub fn document_frequencies(&self) -> Vec<usize> {
        let mut df = vec![0; self.num_words()];
        for set in self.doc_word_sets() {
            for w in set {
                df[w] += 1;
            }
        }
        df
    }

    /// Sorted distinct word ids of every document.
    pub fn doc_word_sets(&self) -> Vec<Vec<usize>> {
        self.documents
            .iter()
            .map(|doc| {
                let mut words = doc.tokens.clone();
                words.sort_unstable();
                words.dedup();
                words
            })
            .collect()
    }

    /// Re-serializes documents as whitespace-joined words, one per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for doc in &self.documents {
            let line: Vec<&str> = doc.tokens.iter().map(|&t| self.vocabulary.word(t)).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vocabulary_is_a_bijection() {
        let v = Vocabulary::from_words(["x", "y", "z"]).unwrap();
        for id in 0..v.len() {
            assert_eq!(v.id(v.word(id)), Some(id));
        }
        assert!(Vocabulary::from_words(["x", "x"]).is_err());
    }

    #[test]
    fn tokenizer_splits_on_non_alphanumeric_runs() {
        let cfg = TokenizerConfig {
            stopwords: vec!["the".into()],
            ..Default::default()
        };
        let toks: Vec<_> = cfg.tokenize("The cat--sat, on THE mat!!").collect();
        assert_eq!(toks, ["cat", "sat", "on", "mat"]);
        let raw = TokenizerConfig {
            lowercase: false,
            ..Default::default()
        };
        assert_eq!(raw.tokenize("A b").collect::<Vec<_>>(), ["A", "b"]);
    }

    #[test]
    fn validation_catches_out_of_range_ids() {
        assert!(Corpus::from_token_ids(2, vec![vec![0, 2]]).is_err());
        assert!(Corpus::from_token_ids(2, vec![vec![]]).is_err());
        assert!(Corpus::from_token_ids(2, vec![]).is_err());
        let doc = Document::new(vec![0]).with_authors(vec![3]);
        let err = Corpus::new(Vocabulary::synthetic(1), vec![doc], Some(vec!["a".into()]), None);
        assert!(err.is_err());
    }

    #[test]
    fn document_frequency_uses_set_semantics() {
        let c = Corpus::from_token_ids(3, vec![vec![0, 0, 1], vec![1, 2]]).unwrap();
        assert_eq!(c.document_frequencies(), vec![1, 2, 1]);
        assert_eq!(c.word_counts(), vec![2, 2, 1]);
    }
}
