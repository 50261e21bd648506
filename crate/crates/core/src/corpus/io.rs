//! Corpus artifact.
//!
//! Header meta: `W`, `D`, `A`, `C` (class count), `has_authors`, `has_labels`.
//! Payload, little-endian:
//!
//! ```text
//! W x str            vocabulary in id order (u32 byte length + UTF-8)
//! A x str            author names
//! C x str            class names
//! D x document:
//!     u32 n, n x u32 token ids
//!     u32 m, m x u32 author ids     (m = u32::MAX when the document has no author list)
//!     u32 label                     (u32::MAX when unlabeled)
//! ```

use std::path::Path;

use super::{Corpus, Document, Vocabulary};
use crate::artifact::{self, ByteReader, ByteWriter, Header};
use crate::error::{Error, Result};

pub const CORPUS_KIND: &str = "corpus";
const NONE: u32 = u32::MAX;

pub fn encode_corpus(corpus: &Corpus, config_hash: &str) -> Vec<u8> {
    let header = Header::new(CORPUS_KIND, config_hash)
        .with("W", corpus.num_words() as u64)
        .with("D", corpus.num_docs() as u64)
        .with("A", corpus.authors.as_ref().map_or(0, Vec::len) as u64)
        .with("C", corpus.class_names.as_ref().map_or(0, Vec::len) as u64)
        .with("has_authors", corpus.authors.is_some())
        .with("has_labels", corpus.class_names.is_some());

    let mut w = ByteWriter::new();
    for word in corpus.vocabulary.words() {
        w.str(word);
    }
    for name in corpus.authors.iter().flatten() {
        w.str(name);
    }
    for name in corpus.class_names.iter().flatten() {
        w.str(name);
    }
    for doc in &corpus.documents {
        w.u32(doc.tokens.len() as u32);
        for &t in &doc.tokens {
            w.u32(t as u32);
        }
        match &doc.authors {
            Some(authors) => {
                w.u32(authors.len() as u32);
                for &a in authors {
                    w.u32(a as u32);
                }
            }
            None => {
                w.u32(NONE);
            }
        }
        w.u32(doc.label.map_or(NONE, |l| l as u32));
    }
    artifact::encode(&header, &w.finish())
}

pub fn save_corpus(corpus: &Corpus, path: &Path, config_hash: &str) -> Result<()> {
    let bytes = encode_corpus(corpus, config_hash);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_corpus(path: &Path) -> Result<(Header, Corpus)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_corpus(path, &bytes)
}

pub fn decode_corpus(path: &Path, bytes: &[u8]) -> Result<(Header, Corpus)> {
    let (header, payload) = artifact::decode(path, bytes, Some(CORPUS_KIND))?;
    let num_words = header.meta_u64("W", path)? as usize;
    let num_docs = header.meta_u64("D", path)? as usize;
    let num_authors = header.meta_u64("A", path)? as usize;
    let num_classes = header.meta_u64("C", path)? as usize;
    let flag = |key: &str| header.meta.get(key).and_then(|v| v.as_bool()).unwrap_or(false);
    let (has_authors, has_labels) = (flag("has_authors"), flag("has_labels"));

    let mut r = ByteReader::new(&payload, path);
    let words = (0..num_words).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    let vocabulary =
        Vocabulary::from_words(words).map_err(|e| Error::format(path, e.to_string()))?;
    let authors = (0..num_authors).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
    let classes = (0..num_classes).map(|_| r.str()).collect::<Result<Vec<_>>>()?;

    let mut documents = Vec::with_capacity(num_docs);
    for _ in 0..num_docs {
        let n = r.u32()? as usize;
        let tokens = (0..n).map(|_| r.u32().map(|t| t as usize)).collect::<Result<_>>()?;
        let m = r.u32()?;
        let doc_authors = if m == NONE {
            None
        } else {
            Some(
                (0..m)
                    .map(|_| r.u32().map(|a| a as usize))
                    .collect::<Result<_>>()?,
            )
        };
        let label = match r.u32()? {
            NONE => None,
            l => Some(l as usize),
        };
        documents.push(Document {
            tokens,
            authors: doc_authors,
            label,
        });
    }
    r.finish()?;

    let corpus = Corpus::new(
        vocabulary,
        documents,
        has_authors.then_some(authors),
        has_labels.then_some(classes),
    )
    .map_err(|e| Error::format(path, e.to_string()))?;
    Ok((header, corpus))
}
