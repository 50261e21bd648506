use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Corpus, Document, TokenizerConfig, Vocabulary};
use crate::error::{Error, Result};

/// Where documents and their sidecar metadata come from.
///
/// A file is read one document per line; a directory is read one document
/// per file, in file-name order. Sidecars hold one line per document:
/// comma-separated author names, or a single class label.
#[derive(Debug, Clone, Default)]
pub struct IngestOptions {
    pub tokenizer: TokenizerConfig,
    pub authors: Option<PathBuf>,
    pub labels: Option<PathBuf>,
}

pub fn ingest(path: &Path, options: &IngestOptions) -> Result<Corpus> {
    let texts = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .map_err(|e| Error::io(path, e))?
            .filter_map(|entry| entry.ok().map(|e| e.path()))
            .filter(|p| p.is_file())
            .collect();
        files.sort();
        files
            .iter()
            .map(|f| fs::read_to_string(f).map_err(|e| Error::io(f, e)))
            .collect::<Result<Vec<_>>>()?
    } else {
        read_lines(path)?
    };

    let authors = options
        .authors
        .as_deref()
        .map(|p| {
            read_lines(p).map(|lines| {
                lines
                    .iter()
                    .map(|l| {
                        l.split(',')
                            .map(str::trim)
                            .filter(|a| !a.is_empty())
                            .map(str::to_string)
                            .collect()
                    })
                    .collect()
            })
        })
        .transpose()?;
    let labels = options
        .labels
        .as_deref()
        .map(|p| read_lines(p).map(|ls| ls.into_iter().map(|l| l.trim().to_string()).collect()))
        .transpose()?;

    ingest_texts(&texts, authors, labels, &options.tokenizer)
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text.lines().map(str::to_string).collect())
}

/// Builds a corpus from in-memory texts. Vocabulary ids follow first
/// occurrence among tokens that survive filtering, so re-ingesting
/// [`Corpus::to_text`] reproduces the same ids.
pub fn ingest_texts(
    texts: &[String],
    authors: Option<Vec<Vec<String>>>,
    labels: Option<Vec<String>>,
    tokenizer: &TokenizerConfig,
) -> Result<Corpus> {
    let raw: Vec<Vec<String>> = texts.iter().map(|t| tokenizer.tokenize(t).collect()).collect();

    let mut counts: HashMap<&str, usize> = HashMap::new();
    for tok in raw.iter().flatten() {
        *counts.entry(tok.as_str()).or_default() += 1;
    }

    let mut vocabulary = Vocabulary::new();
    let mut documents: Vec<Document> = raw
        .iter()
        .map(|toks| {
            Document::new(
                toks.iter()
                    .filter(|t| counts[t.as_str()] >= tokenizer.min_count)
                    .map(|t| vocabulary.insert(t.clone()))
                    .collect(),
            )
        })
        .collect();

    if documents.iter().all(Document::is_empty) {
        return Err(Error::data("corpus is empty after filtering"));
    }

    let author_names = match authors {
        Some(lists) => {
            check_sidecar("author", lists.len(), documents.len())?;
            let mut registry = Vocabulary::new();
            for (doc, names) in documents.iter_mut().zip(lists) {
                let mut ids: Vec<usize> = names.into_iter().map(|n| registry.insert(n)).collect();
                ids.sort_unstable();
                ids.dedup();
                doc.authors = Some(ids);
            }
            Some(registry.words().to_vec())
        }
        None => None,
    };

    let class_names = match labels {
        Some(labels) => {
            check_sidecar("label", labels.len(), documents.len())?;
            let mut registry = Vocabulary::new();
            for (doc, label) in documents.iter_mut().zip(labels) {
                doc.label = Some(registry.insert(label));
            }
            Some(registry.words().to_vec())
        }
        None => None,
    };

    Corpus::new(vocabulary, documents, author_names, class_names)
}

fn check_sidecar(what: &str, lines: usize, docs: usize) -> Result<()> {
    if lines == docs {
        Ok(())
    } else {
        Err(Error::data(format!(
            "{what} sidecar has {lines} lines for {docs} documents"
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(lines: &[&str]) -> Vec<String> {
        lines.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn counts_for_two_line_corpus() {
        let c = ingest_texts(&texts(&["a b a", "b c"]), None, None, &Default::default()).unwrap();
        assert_eq!((c.num_words(), c.num_docs(), c.num_tokens()), (3, 2, 5));
    }

    #[test]
    fn min_count_drops_rare_words() {
        let cfg = TokenizerConfig {
            min_count: 2,
            ..Default::default()
        };
        let c = ingest_texts(&texts(&["a b a", "b c"]), None, None, &cfg).unwrap();
        assert_eq!((c.num_words(), c.num_tokens()), (2, 4));
        assert!(c.vocabulary.id("c").is_none());
    }

    #[test]
    fn empty_after_filtering_is_an_error() {
        let cfg = TokenizerConfig {
            stopwords: vec!["a".into()],
            ..Default::default()
        };
        assert!(ingest_texts(&texts(&["a a", "!!"]), None, None, &cfg).is_err());
    }

    #[test]
    fn sidecar_length_mismatch_is_an_error() {
        let authors = Some(vec![vec!["x".to_string()]]);
        let err = ingest_texts(&texts(&["a", "b"]), authors, None, &Default::default());
        assert!(matches!(err, Err(Error::Data(_))));
        let labels = Some(vec!["p".to_string()]);
        assert!(ingest_texts(&texts(&["a", "b"]), None, labels, &Default::default()).is_err());
    }

    #[test]
    fn authors_and_labels_get_registries() {
        let authors = Some(vec![
            vec!["ann".to_string(), "bo".to_string()],
            vec!["bo".to_string()],
        ]);
        let labels = Some(vec!["sport".to_string(), "news".to_string()]);
        let c = ingest_texts(&texts(&["a", "b"]), authors, labels, &Default::default()).unwrap();
        assert_eq!(c.authors.as_deref().unwrap(), ["ann", "bo"]);
        assert_eq!(c.documents[1].authors, Some(vec![1]));
        assert_eq!(c.labels().unwrap(), vec![0, 1]);
        assert_eq!(c.num_classes(), 2);
    }

    #[test]
    fn reads_files_and_directories() {
        let dir = tempfile::tempdir().unwrap();
        let lines = dir.path().join("docs.txt");
        fs::write(&lines, "a b a\nb c\n").unwrap();
        let labels = dir.path().join("labels.txt");
        fs::write(&labels, "x\ny\n").unwrap();
        let opts = IngestOptions {
            labels: Some(labels),
            ..Default::default()
        };
        let c = ingest(&lines, &opts).unwrap();
        assert_eq!(c.num_docs(), 2);
        assert_eq!(c.labels().unwrap(), vec![0, 1]);

        let per_file = dir.path().join("per_file");
        fs::create_dir(&per_file).unwrap();
        fs::write(per_file.join("02.txt"), "second doc").unwrap();
        fs::write(per_file.join("01.txt"), "first\ndoc").unwrap();
        let c = ingest(&per_file, &IngestOptions::default()).unwrap();
        assert_eq!(c.num_docs(), 2);
        assert_eq!(c.vocabulary.word(0), "first");

        assert!(matches!(
            ingest(&dir.path().join("missing"), &IngestOptions::default()),
            Err(Error::Io { .. })
        ));
    }
}
