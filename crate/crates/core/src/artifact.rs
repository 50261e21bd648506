//! On-disk envelope shared by every artifact the pipeline writes.
//!
//! Layout:
//!
//! ```text
//! NEA-ARTIFACT <header JSON>\n
//! <payload bytes, little-endian>
//! ```
//!
//! The header is a single line of JSON with `format_version`, `kind`,
//! `config_hash` and a kind-specific `meta` object (keys sorted). Readers
//! refuse any `format_version` other than [`FORMAT_VERSION`].

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAGIC: &str = "NEA-ARTIFACT";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format_version: u32,
    pub kind: String,
    pub config_hash: String,
    #[serde(default)]
    pub meta: serde_json::Map<String, serde_json::Value>,
}

impl Header {
    pub fn new(kind: &str, config_hash: &str) -> Self {
        Header {
            format_version: FORMAT_VERSION,
            kind: kind.to_string(),
            config_hash: config_hash.to_string(),
            meta: serde_json::Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.meta.insert(key.to_string(), value.into());
        self
    }

    pub fn meta_u64(&self, key: &str, path: &Path) -> Result<u64> {
        self.meta
            .get(key)
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| Error::format(path, format!("header is missing integer `{key}`")))
    }

    pub fn meta_f64(&self, key: &str, path: &Path) -> Result<f64> {
        self.meta
            .get(key)
            .and_then(serde_json::Value::as_f64)
            .ok_or_else(|| Error::format(path, format!("header is missing number `{key}`")))
    }

    pub fn meta_str(&self, key: &str, path: &Path) -> Result<String> {
        self.meta
            .get(key)
            .and_then(serde_json::Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| Error::format(path, format!("header is missing string `{key}`")))
    }
}

pub fn encode(header: &Header, payload: &[u8]) -> Vec<u8> {
    let json = serde_json::to_string(header).expect("header serializes");
    let mut out = Vec::with_capacity(MAGIC.len() + json.len() + 2 + payload.len());
    out.extend_from_slice(MAGIC.as_bytes());
    out.push(b' ');
    out.extend_from_slice(json.as_bytes());
    out.push(b'\n');
    out.extend_from_slice(payload);
    out
}

pub fn write(path: &Path, header: &Header, payload: &[u8]) -> Result<()> {
    let bytes = encode(header, payload);
    let mut file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(&bytes).map_err(|e| Error::io(path, e))
}

/// Parses an artifact, checking the version and (when given) the kind.
pub fn decode(path: &Path, bytes: &[u8], expected_kind: Option<&str>) -> Result<(Header, Vec<u8>)> {
    let newline = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| Error::format(path, "missing header line"))?;
    let line = std::str::from_utf8(&bytes[..newline])
        .map_err(|_| Error::format(path, "header is not UTF-8"))?;
    let json = line
        .strip_prefix(MAGIC)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| Error::format(path, "not an NEA artifact"))?;
    let header: Header =
        serde_json::from_str(json).map_err(|e| Error::format(path, format!("bad header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(Error::Version {
            path: path.to_path_buf(),
            found: header.format_version,
            expected: FORMAT_VERSION,
        });
    }
    if let Some(kind) = expected_kind {
        if header.kind != kind {
            return Err(Error::format(
                path,
                format!("expected a `{kind}` artifact, found `{}`", header.kind),
            ));
        }
    }
    Ok((header, bytes[newline + 1..].to_vec()))
}

pub fn read(path: &Path, expected_kind: Option<&str>) -> Result<(Header, Vec<u8>)> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(path, &bytes, expected_kind)
}

/// Little-endian payload builder.
#[derive(Default)]
pub struct ByteWriter {
    buf: Vec<u8>,
}

impl ByteWriter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f32(&mut self, v: f32) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn f64(&mut self, v: f64) -> &mut Self {
        self.buf.extend_from_slice(&v.to_le_bytes());
        self
    }

    pub fn str(&mut self, s: &str) -> &mut Self {
        self.u32(s.len() as u32);
        self.buf.extend_from_slice(s.as_bytes());
        self
    }

    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

pub struct ByteReader<'a> {
    bytes: &'a [u8],
    pos: usize,
    path: &'a Path,
}

impl<'a> ByteReader<'a> {
    pub fn new(bytes: &'a [u8], path: &'a Path) -> Self {
        ByteReader { bytes, pos: 0, path }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&end| end <= self.bytes.len())
            .ok_or_else(|| Error::format(self.path, "payload truncated"))?;
        let slice = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(slice)
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn f32(&mut self) -> Result<f32> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn str(&mut self) -> Result<String> {
        let len = self.u32()? as usize;
        let raw = self.take(len)?;
        String::from_utf8(raw.to_vec()).map_err(|_| Error::format(self.path, "string is not UTF-8"))
    }

    pub fn finish(self) -> Result<()> {
        if self.pos == self.bytes.len() {
            Ok(())
        } else {
            Err(Error::format(
                self.path,
                format!("{} trailing bytes", self.bytes.len() - self.pos),
            ))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_round_trips() {
        let path = Path::new("mem");
        let header = Header::new("table", "abc").with("rows", 2u64);
        let mut w = ByteWriter::new();
        w.u32(7).f64(0.5).str("héllo");
        let bytes = encode(&header, &w.finish());
        let (h, payload) = decode(path, &bytes, Some("table")).unwrap();
        assert_eq!(h, header);
        let mut r = ByteReader::new(&payload, path);
        assert_eq!(r.u32().unwrap(), 7);
        assert_eq!(r.f64().unwrap(), 0.5);
        assert_eq!(r.str().unwrap(), "héllo");
        r.finish().unwrap();
    }

    #[test]
    fn rejects_other_versions_and_kinds() {
        let path = Path::new("mem");
        let mut header = Header::new("table", "abc");
        header.format_version = FORMAT_VERSION + 1;
        let bytes = encode(&header, &[]);
        assert!(matches!(decode(path, &bytes, None), Err(Error::Version { .. })));

        let bytes = encode(&Header::new("table", "abc"), &[]);
        assert!(matches!(decode(path, &bytes, Some("corpus")), Err(Error::Format { .. })));
        assert!(decode(path, b"garbage\n", None).is_err());
    }

    #[test]
    fn truncated_payload_is_an_error() {
        let path = Path::new("mem");
        let mut r = ByteReader::new(&[1, 2], path);
        assert!(r.u32().is_err());
    }
}
