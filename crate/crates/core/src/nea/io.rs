//! Embedding, document-vector and smoothed-table artifacts.
//!
//! Embeddings: header meta `dim` and `matrices`, a list of
//! `{"name", "rows"}` in payload order. Names are `<entity>.in` for input
//! vectors and `<entity>.out` for output vectors. Payload is each matrix
//! row-major as little-endian `f32`.
//!
//! Document vectors: meta `D`, `dim`, `empty`; payload `D x dim` `f64`
//! followed by `empty x u32` ids of empty documents. Vectors stay `f64` so
//! the unit-norm guarantee survives a round trip.
//!
//! Tables: meta `parent`, `child`, `rows`, `cols`; payload `rows x cols` `f64`.

use std::io::Write;
use std::path::Path;

use serde_json::json;

use super::{DocEmbeddings, EmbeddingSet, GeneralEmbeddings};
use crate::artifact::{self, ByteReader, ByteWriter, Header};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const EMBEDDINGS_KIND: &str = "embeddings";
pub const DOC_VECTORS_KIND: &str = "doc-vectors";
pub const TABLE_KIND: &str = "table";

/// Named matrices for the embeddings artifact.
pub type NamedMatrices = Vec<(String, Matrix)>;

impl EmbeddingSet {
    pub fn named(&self) -> NamedMatrices {
        vec![
            (format!("{}.in", self.input_kind), self.input.clone()),
            (format!("{}.out", self.output_kind), self.output.clone()),
        ]
    }

    /// Rebuilds a set from exactly one `.in` and one `.out` matrix.
    pub fn from_named(named: NamedMatrices) -> Result<Self> {
        let mut input = None;
        let mut output = None;
        for (name, m) in named {
            if let Some(kind) = name.strip_suffix(".in") {
                if input.replace((kind.to_string(), m)).is_some() {
                    return Err(Error::data("more than one input matrix"));
                }
            } else if let Some(kind) = name.strip_suffix(".out") {
                if output.replace((kind.to_string(), m)).is_some() {
                    return Err(Error::data("more than one output matrix"));
                }
            } else {
                return Err(Error::data(format!("matrix `{name}` has no role suffix")));
            }
        }
        match (input, output) {
            (Some((ik, i)), Some((ok, o))) => EmbeddingSet::new(i, o, &ik, &ok),
            _ => Err(Error::data("need one input and one output matrix")),
        }
    }
}

impl GeneralEmbeddings {
    pub fn named(&self) -> NamedMatrices {
        let mut out = Vec::new();
        for (i, name) in self.names.iter().enumerate() {
            if let Some(m) = &self.inputs[i] {
                out.push((format!("{name}.in"), m.clone()));
            }
            if let Some(m) = &self.outputs[i] {
                out.push((format!("{name}.out"), m.clone()));
            }
        }
        out
    }
}

pub fn encode_embeddings(named: &[(String, Matrix)], config_hash: &str) -> Result<Vec<u8>> {
    let dim = named.first().map_or(0, |(_, m)| m.cols());
    if let Some((_, m)) = named.iter().find(|(_, m)| m.cols() != dim) {
        return Err(Error::Dimension {
            expected: dim,
            actual: m.cols(),
        });
    }
    let list: Vec<_> = named
        .iter()
        .map(|(name, m)| json!({ "name": name, "rows": m.rows() }))
        .collect();
    let header = Header::new(EMBEDDINGS_KIND, config_hash)
        .with("dim", dim as u64)
        .with("matrices", list);
    let mut w = ByteWriter::new();
    for (_, m) in named {
        for &v in m.as_slice() {
            w.f32(v as f32);
        }
    }
    Ok(artifact::encode(&header, &w.finish()))
}

pub fn save_embeddings(named: &[(String, Matrix)], path: &Path, config_hash: &str) -> Result<()> {
    let bytes = encode_embeddings(named, config_hash)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_embeddings(path: &Path) -> Result<(Header, NamedMatrices)> {
    let (header, payload) = artifact::read(path, Some(EMBEDDINGS_KIND))?;
    let dim = header.meta_u64("dim", path)? as usize;
    let list = header
        .meta
        .get("matrices")
        .and_then(|v| v.as_array())
        .ok_or_else(|| Error::format(path, "missing matrix list"))?;
    let mut r = ByteReader::new(&payload, path);
    let mut out = Vec::with_capacity(list.len());
    for entry in list {
        let name = entry["name"]
            .as_str()
            .ok_or_else(|| Error::format(path, "matrix entry without a name"))?;
        let rows = entry["rows"]
            .as_u64()
            .ok_or_else(|| Error::format(path, "matrix entry without a row count"))?
            as usize;
        let data = (0..rows * dim)
            .map(|_| r.f32().map(f64::from))
            .collect::<Result<Vec<_>>>()?;
        out.push((name.to_string(), Matrix::from_vec(rows, dim, data)?));
    }
    r.finish()?;
    Ok((header, out))
}

pub fn encode_doc_embeddings(docs: &DocEmbeddings, config_hash: &str) -> Vec<u8> {
    let header = Header::new(DOC_VECTORS_KIND, config_hash)
        .with("D", docs.vectors.rows() as u64)
        .with("dim", docs.dim() as u64)
        .with("empty", docs.empty_docs.len() as u64);
    let mut w = ByteWriter::new();
    for &v in docs.vectors.as_slice() {
        w.f64(v);
    }
    for &d in &docs.empty_docs {
        w.u32(d as u32);
    }
    artifact::encode(&header, &w.finish())
}

pub fn save_doc_embeddings(docs: &DocEmbeddings, path: &Path, config_hash: &str) -> Result<()> {
    std::fs::write(path, encode_doc_embeddings(docs, config_hash)).map_err(|e| Error::io(path, e))
}

pub fn load_doc_embeddings(path: &Path) -> Result<(Header, DocEmbeddings)> {
    let (header, payload) = artifact::read(path, Some(DOC_VECTORS_KIND))?;
    let d = header.meta_u64("D", path)? as usize;
    let dim = header.meta_u64("dim", path)? as usize;
    let empty = header.meta_u64("empty", path)? as usize;
    let mut r = ByteReader::new(&payload, path);
    let data = (0..d * dim).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    let empty_docs = (0..empty).map(|_| r.u32().map(|v| v as usize)).collect::<Result<_>>()?;
    r.finish()?;
    Ok((
        header,
        DocEmbeddings {
            vectors: Matrix::from_vec(d, dim, data)?,
            empty_docs,
        },
    ))
}

pub fn encode_table(table: &Matrix, parent: &str, child: &str, config_hash: &str) -> Vec<u8> {
    let header = Header::new(TABLE_KIND, config_hash)
        .with("parent", parent)
        .with("child", child)
        .with("rows", table.rows() as u64)
        .with("cols", table.cols() as u64);
    let mut w = ByteWriter::new();
    for &v in table.as_slice() {
        w.f64(v);
    }
    artifact::encode(&header, &w.finish())
}

pub fn save_table(table: &Matrix, parent: &str, child: &str, path: &Path, config_hash: &str) -> Result<()> {
    std::fs::write(path, encode_table(table, parent, child, config_hash)).map_err(|e| Error::io(path, e))
}

pub fn load_table(path: &Path) -> Result<(Header, Matrix)> {
    let (header, payload) = artifact::read(path, Some(TABLE_KIND))?;
    let rows = header.meta_u64("rows", path)? as usize;
    let cols = header.meta_u64("cols", path)? as usize;
    let mut r = ByteReader::new(&payload, path);
    let data = (0..rows * cols).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    r.finish()?;
    Ok((header, Matrix::from_vec(rows, cols, data)?))
}

/// Plain-text vectors: a `count dim` line, then `name v_1 ... v_dim` per row.
pub fn write_text_vectors(names: &[String], vectors: &Matrix, path: &Path) -> Result<()> {
    if names.len() != vectors.rows() {
        return Err(Error::Dimension {
            expected: vectors.rows(),
            actual: names.len(),
        });
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        writeln!(out, "{} {}", vectors.rows(), vectors.cols())?;
        for (name, row) in names.iter().zip(vectors.iter_rows()) {
            write!(out, "{}", name.replace(char::is_whitespace, "_"))?;
            for v in row {
                write!(out, " {}", *v as f32)?;
            }
            writeln!(out)?;
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set() -> EmbeddingSet {
        EmbeddingSet::new(
            Matrix::from_rows(&[vec![0.5, -1.25], vec![2.0, 0.0]]).unwrap(),
            Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![0.0, -0.5]]).unwrap(),
            "topic",
            "word",
        )
        .unwrap()
    }

    #[test]
    fn embeddings_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.bin");
        let e = set();
        save_embeddings(&e.named(), &path, "h").unwrap();
        let (header, named) = load_embeddings(&path).unwrap();
        assert_eq!(header.config_hash, "h");
        assert_eq!(EmbeddingSet::from_named(named).unwrap(), e);
    }

    #[test]
    fn rejects_wrong_kind() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.bin");
        save_table(&set().input, "a", "b", &path, "h").unwrap();
        assert!(load_embeddings(&path).is_err());
        let (header, back) = load_table(&path).unwrap();
        assert_eq!(back, set().input);
        assert_eq!(header.meta_str("parent", &path).unwrap(), "a");
    }

    #[test]
    fn doc_vectors_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.bin");
        let s = 1.0 / 3f64.sqrt();
        let docs = DocEmbeddings {
            vectors: Matrix::from_rows(&[vec![s, s, s], vec![0.0; 3]]).unwrap(),
            empty_docs: vec![1],
        };
        save_doc_embeddings(&docs, &path, "h").unwrap();
        assert_eq!(load_doc_embeddings(&path).unwrap().1, docs);
    }

    #[test]
    fn text_vectors_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.txt");
        let e = set();
        write_text_vectors(&["a b".into(), "c".into()], &e.input, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "2 2\na_b 0.5 -1.25\nc 2 0\n");
        assert!(write_text_vectors(&["x".into()], &e.input, &path).is_err());
    }
}
