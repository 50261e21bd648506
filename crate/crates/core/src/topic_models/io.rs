//! Topic-model artifact.
//!
//! Header meta: `model` (`lda` | `atm` | `mmsgtm`), `K`, `W`, `D`, `A`
//! (ATM only), `N` (tokens), `alpha`, `beta`, `window` (MMSGTM only), `seed`.
//! Payload, little-endian:
//!
//! ```text
//! D x u32              document lengths
//! rows x cols x f64    first table (theta: D x K | theta_author: A x K | theta_word: W x K)
//! K x W x f64          phi
//! N x u32              topic assignments
//! N x u32              author assignments (ATM only)
//! ```

use std::path::Path;

use super::{AtmParams, LdaParams, MmsgtmParams};
use crate::artifact::{self, ByteReader, ByteWriter, Header};
use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub const MODEL_KIND: &str = "topic-model";

#[derive(Debug, Clone, PartialEq)]
pub enum TopicModel {
    Lda(LdaParams),
    Atm(AtmParams),
    Mmsgtm(MmsgtmParams),
}

impl TopicModel {
    pub fn name(&self) -> &'static str {
        match self {
            TopicModel::Lda(_) => "lda",
            TopicModel::Atm(_) => "atm",
            TopicModel::Mmsgtm(_) => "mmsgtm",
        }
    }

    pub fn phi(&self) -> &Matrix {
        match self {
            TopicModel::Lda(p) => &p.phi,
            TopicModel::Atm(p) => &p.phi,
            TopicModel::Mmsgtm(p) => &p.phi,
        }
    }

    pub fn z(&self) -> &[usize] {
        match self {
            TopicModel::Lda(p) => &p.z,
            TopicModel::Atm(p) => &p.z,
            TopicModel::Mmsgtm(p) => &p.z,
        }
    }

    pub fn doc_lengths(&self) -> &[usize] {
        match self {
            TopicModel::Lda(p) => &p.doc_lengths,
            TopicModel::Atm(p) => &p.doc_lengths,
            TopicModel::Mmsgtm(p) => &p.doc_lengths,
        }
    }

    /// Topic assignments, one slice per document.
    pub fn doc_assignments(&self) -> impl Iterator<Item = &[usize]> {
        let z = self.z();
        let mut start = 0;
        self.doc_lengths().iter().map(move |&n| {
            let slice = &z[start..start + n];
            start += n;
            slice
        })
    }

    pub fn num_topics(&self) -> usize {
        self.phi().rows()
    }

    pub fn topic_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_topics()];
        for &k in self.z() {
            sizes[k] += 1;
        }
        sizes
    }
}

fn put_matrix(w: &mut ByteWriter, m: &Matrix) {
    for &v in m.as_slice() {
        w.f64(v);
    }
}

fn get_matrix(r: &mut ByteReader, rows: usize, cols: usize) -> Result<Matrix> {
    let data = (0..rows * cols).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
    Matrix::from_vec(rows, cols, data)
}

fn put_ids(w: &mut ByteWriter, ids: &[usize]) {
    for &i in ids {
        w.u32(i as u32);
    }
}

fn get_ids(r: &mut ByteReader, n: usize) -> Result<Vec<usize>> {
    (0..n).map(|_| r.u32().map(|v| v as usize)).collect()
}

pub fn encode_model(model: &TopicModel, config_hash: &str, seed: u64) -> Vec<u8> {
    let (first, doc_lengths, alpha, beta) = match model {
        TopicModel::Lda(p) => (&p.theta, &p.doc_lengths, p.alpha, p.beta),
        TopicModel::Atm(p) => (&p.theta_author, &p.doc_lengths, p.alpha, p.beta),
        TopicModel::Mmsgtm(p) => (&p.theta_word, &p.doc_lengths, p.alpha, p.beta),
    };
    let phi = model.phi();
    let mut header = Header::new(MODEL_KIND, config_hash)
        .with("model", model.name())
        .with("K", phi.rows() as u64)
        .with("W", phi.cols() as u64)
        .with("D", doc_lengths.len() as u64)
        .with("N", model.z().len() as u64)
        .with("alpha", alpha)
        .with("beta", beta)
        .with("seed", seed);
    match model {
        TopicModel::Atm(p) => header = header.with("A", p.num_authors() as u64),
        TopicModel::Mmsgtm(p) => header = header.with("window", p.window as u64),
        TopicModel::Lda(_) => {}
    }

    let mut w = ByteWriter::new();
    put_ids(&mut w, doc_lengths);
    put_matrix(&mut w, first);
    put_matrix(&mut w, phi);
    put_ids(&mut w, model.z());
    if let TopicModel::Atm(p) = model {
        put_ids(&mut w, &p.a);
    }
    artifact::encode(&header, &w.finish())
}

pub fn save_model(model: &TopicModel, path: &Path, config_hash: &str, seed: u64) -> Result<()> {
    std::fs::write(path, encode_model(model, config_hash, seed)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<(Header, TopicModel)> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_model(path, &bytes)
}

pub fn decode_model(path: &Path, bytes: &[u8]) -> Result<(Header, TopicModel)> {
    let (header, payload) = artifact::decode(path, bytes, Some(MODEL_KIND))?;
    let kind = header.meta_str("model", path)?;
    let k = header.meta_u64("K", path)? as usize;
    let w = header.meta_u64("W", path)? as usize;
    let d = header.meta_u64("D", path)? as usize;
    let n = header.meta_u64("N", path)? as usize;
    let alpha = header.meta_f64("alpha", path)?;
    let beta = header.meta_f64("beta", path)?;

    let mut r = ByteReader::new(&payload, path);
    let doc_lengths = get_ids(&mut r, d)?;
    if doc_lengths.iter().sum::<usize>() != n {
        return Err(Error::format(path, "document lengths do not add up to N"));
    }
    let model = match kind.as_str() {
        "lda" => {
            let theta = get_matrix(&mut r, d, k)?;
            let phi = get_matrix(&mut r, k, w)?;
            let z = get_ids(&mut r, n)?;
            TopicModel::Lda(LdaParams { theta, phi, z, doc_lengths, alpha, beta })
        }
        "atm" => {
            let a = header.meta_u64("A", path)? as usize;
            let theta_author = get_matrix(&mut r, a, k)?;
            let phi = get_matrix(&mut r, k, w)?;
            let z = get_ids(&mut r, n)?;
            let authors = get_ids(&mut r, n)?;
            TopicModel::Atm(AtmParams {
                theta_author,
                phi,
                z,
                a: authors,
                doc_lengths,
                alpha,
                beta,
            })
        }
        "mmsgtm" => {
            let window = header.meta_u64("window", path)? as usize;
            let theta_word = get_matrix(&mut r, w, k)?;
            let phi = get_matrix(&mut r, k, w)?;
            let z = get_ids(&mut r, n)?;
            TopicModel::Mmsgtm(MmsgtmParams { theta_word, phi, z, doc_lengths, window, alpha, beta })
        }
        other => return Err(Error::format(path, format!("unknown model kind `{other}`"))),
    };
    r.finish()?;
    if model.z().iter().any(|&z| z >= k) {
        return Err(Error::format(path, "topic assignment out of range"));
    }
    Ok((header, model))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;
    use crate::topic_models::{train_lda, train_mmsgtm, SamplerConfig};

    #[test]
    fn models_round_trip_bit_exactly() {
        let c = Corpus::from_token_ids(4, vec![vec![0, 1, 2], vec![3, 1, 0, 0]]).unwrap();
        let lda = TopicModel::Lda(train_lda(&c, &SamplerConfig::new(3, 5), 1).unwrap());
        let mm = TopicModel::Mmsgtm(train_mmsgtm(&c, &SamplerConfig::new(2, 5), 1).unwrap());
        for model in [lda, mm] {
            let bytes = encode_model(&model, "cfg", 1);
            let (header, back) = decode_model(Path::new("mem"), &bytes).unwrap();
            assert_eq!(back, model);
            assert_eq!(header.meta_u64("seed", Path::new("")).unwrap(), 1);
        }
    }

    #[test]
    fn corrupted_payload_rejected() {
        let c = Corpus::from_token_ids(2, vec![vec![0, 1]]).unwrap();
        let model = TopicModel::Lda(train_lda(&c, &SamplerConfig::new(2, 1), 0).unwrap());
        let mut bytes = encode_model(&model, "", 0);
        bytes.pop();
        assert!(decode_model(Path::new("mem"), &bytes).is_err());
    }
}
