//! Golden-fixture files produced by the weight exporter.
//!
//! Tensor files (`.cnnt`) are a 20-byte header followed by raw data:
//!
//! ```text
//! "CNNT"  magic
//! u32     version (1)
//! u32     height, width, channels
//! f32...  values, (row, col, channel) order, little-endian
//! ```
//!
//! Score vectors are stored as `1 × 1 × K` tensors. A JSON manifest ties a
//! CNNW file to its input/output pairs.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::tensor::{Shape3, Tensor3};

pub const TENSOR_MAGIC: [u8; 4] = *b"CNNT";

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("bad tensor file: {0}")]
    Format(String),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
}

pub fn encode_tensor(t: &Tensor3) -> Vec<u8> {
    let s = t.shape();
    let mut out = Vec::with_capacity(20 + 4 * s.len());
    out.extend_from_slice(&TENSOR_MAGIC);
    for v in [1, s.height, s.width, s.channels] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for v in t.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_tensor(bytes: &[u8]) -> Result<Tensor3, FixtureError> {
    if bytes.len() < 20 || bytes[..4] != TENSOR_MAGIC {
        return Err(FixtureError::Format("missing CNNT header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    if word(0) != 1 {
        return Err(FixtureError::Format(format!("unsupported version {}", word(0))));
    }
    let shape = Shape3::new(word(1), word(2), word(3));
    let body = &bytes[20..];
    if body.len() != shape.len() * 4 {
        return Err(FixtureError::Format(format!(
            "shape {shape} needs {} bytes, found {}",
            shape.len() * 4,
            body.len()
        )));
    }
    let data = body
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor3::new(shape, data).map_err(|e| FixtureError::Format(e.to_string()))
}

pub fn read_tensor(path: &Path) -> Result<Tensor3, FixtureError> {
    let bytes = std::fs::read(path).map_err(|source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    decode_tensor(&bytes)
}

pub fn write_tensor(path: &Path, t: &Tensor3) -> Result<(), FixtureError> {
    std::fs::write(path, encode_tensor(t)).map_err(|source| FixtureError::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixturePair {
    pub input: PathBuf,
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureManifest {
    pub network: PathBuf,
    pub input_shape: [usize; 3],
    #[serde(default)]
    pub labels: Vec<String>,
    pub seed: u64,
    pub tolerance: f64,
    pub pairs: Vec<FixturePair>,
}

impl FixtureManifest {
    pub fn read(path: &Path) -> Result<Self, FixtureError> {
        let text = std::fs::read_to_string(path).map_err(|source| FixtureError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn input_shape(&self) -> Shape3 {
        Shape3::new(self.input_shape[0], self.input_shape[1], self.input_shape[2])
    }
}
