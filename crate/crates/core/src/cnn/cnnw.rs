//! CNNW, the portable weight container.
//!
//! All integers are little-endian.
//!
//! ```text
//! "CNNW"            4 bytes magic (43 4E 4E 57)
//! version           u32, currently 1
//! layer_count       u32
//! per layer:
//!   type            u8   1=Conv2D 2=MaxPool 3=Flatten 4=Dense
//!   activation      u8   0=None 1=ReLU 2=LeakyReLU 3=Tanh 4=Sigmoid 5=Softmax
//!   alpha           f32  only when activation == 2
//!   frozen          u8   0 or 1
//!   dims            u32s Conv2D: f, C_in, C_out, stride, pad
//!                        MaxPool: f, s
//!                        Dense: in, out
//!   weights         f32s Conv2D kernel (row, col, in, out); Dense (in, out)
//!   bias            f32s Conv2D: C_out; Dense: out
//! crc32             u32 over every preceding byte
//! ```

use thiserror::Error;

use super::activation::Activation;
use super::layer::{Conv2d, Dense, MaxPool};
use super::network::{LayerKind, LayerSpec, Network};

pub const MAGIC: [u8; 4] = *b"CNNW";
pub const VERSION: u32 = 1;

const TAG_CONV: u8 = 1;
const TAG_POOL: u8 = 2;
const TAG_FLATTEN: u8 = 3;
const TAG_DENSE: u8 = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CnnwError {
    #[error("bad magic {0:02x?}, expected \"CNNW\"")]
    BadMagic([u8; 4]),
    #[error("unsupported CNNW version {0}")]
    UnsupportedVersion(u32),
    #[error("stream truncated at byte {offset}: needed {needed} more bytes")]
    Truncated { offset: usize, needed: usize },
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
    #[error("layer {index}: unknown {what} tag {tag}")]
    UnknownTag { index: usize, what: &'static str, tag: u8 },
    #[error("layer {index}: {reason}")]
    InconsistentLayer { index: usize, reason: String },
    #[error("{0} unexpected bytes after checksum")]
    TrailingBytes(usize),
}

impl CnnwError {
    /// Stable numeric code, distinct per variant.
    pub fn code(&self) -> u32 {
        match self {
            Self::BadMagic(_) => 1,
            Self::UnsupportedVersion(_) => 2,
            Self::Truncated { .. } => 3,
            Self::ChecksumMismatch { .. } => 4,
            Self::UnknownTag { .. } => 5,
            Self::InconsistentLayer { .. } => 6,
            Self::TrailingBytes(_) => 7,
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], CnnwError> {
        let remaining = self.bytes.len() - self.pos;
        if n > remaining {
            return Err(CnnwError::Truncated {
                offset: self.bytes.len(),
                needed: n - remaining,
            });
        }
        let out = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8, CnnwError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, CnnwError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32(&mut self) -> Result<f32, CnnwError> {
        Ok(f32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn f32s(&mut self, count: usize) -> Result<Vec<f32>, CnnwError> {
        let n = count.checked_mul(4).ok_or(CnnwError::Truncated {
            offset: self.bytes.len(),
            needed: usize::MAX,
        })?;
        Ok(self
            .take(n)?
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }

    fn dims<const N: usize>(&mut self) -> Result<[usize; N], CnnwError> {
        let mut out = [0usize; N];
        for d in out.iter_mut() {
            *d = self.u32()? as usize;
        }
        Ok(out)
    }
}

fn product(index: usize, dims: &[usize]) -> Result<usize, CnnwError> {
    dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d)).ok_or_else(|| CnnwError::InconsistentLayer {
        index,
        reason: format!("dimensions {dims:?} overflow"),
    })
}

/// Parses a CNNW stream. Nothing is returned unless the whole stream,
/// including its checksum, is valid.
pub fn load_weights(bytes: &[u8]) -> Result<Network, CnnwError> {
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r.take(4)?.try_into().unwrap();
    if magic != MAGIC {
        return Err(CnnwError::BadMagic(magic));
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(CnnwError::UnsupportedVersion(version));
    }
    let count = r.u32()? as usize;
    let mut layers = Vec::with_capacity(count.min(1024));
    for index in 0..count {
        layers.push(read_layer(&mut r, index)?);
    }
    let body_end = r.pos;
    let stored = r.u32()?;
    let computed = crc32fast::hash(&bytes[..body_end]);
    if stored != computed {
        return Err(CnnwError::ChecksumMismatch { stored, computed });
    }
    if r.pos != bytes.len() {
        return Err(CnnwError::TrailingBytes(bytes.len() - r.pos));
    }
    Network::new(layers).map_err(|e| match e {
        super::CnnError::Build { index, reason } => CnnwError::InconsistentLayer { index, reason },
        other => CnnwError::InconsistentLayer {
            index: 0,
            reason: other.to_string(),
        },
    })
}

fn read_layer(r: &mut Reader<'_>, index: usize) -> Result<LayerSpec, CnnwError> {
    let type_tag = r.u8()?;
    let act_tag = r.u8()?;
    let activation = match act_tag {
        0 => Activation::None,
        1 => Activation::Relu,
        2 => Activation::LeakyRelu(r.f32()?),
        3 => Activation::Tanh,
        4 => Activation::Sigmoid,
        5 => Activation::Softmax,
        tag => {
            return Err(CnnwError::UnknownTag {
                index,
                what: "activation",
                tag,
            })
        }
    };
    let frozen = match r.u8()? {
        0 => false,
        1 => true,
        other => {
            return Err(CnnwError::InconsistentLayer {
                index,
                reason: format!("frozen flag must be 0 or 1, got {other}"),
            })
        }
    };
    let kind = match type_tag {
        TAG_CONV => {
            let [filter, in_channels, out_channels, stride, pad] = r.dims::<5>()?;
            let kernel = r.f32s(product(index, &[filter, filter, in_channels, out_channels])?)?;
            let bias = r.f32s(out_channels)?;
            LayerKind::Conv2d(Conv2d {
                filter,
                in_channels,
                out_channels,
                stride,
                pad,
                kernel,
                bias,
            })
        }
        TAG_POOL => {
            let [size, stride] = r.dims::<2>()?;
            LayerKind::MaxPool(MaxPool { size, stride })
        }
        TAG_FLATTEN => LayerKind::Flatten,
        TAG_DENSE => {
            let [inputs, outputs] = r.dims::<2>()?;
            let weights = r.f32s(product(index, &[inputs, outputs])?)?;
            let bias = r.f32s(outputs)?;
            LayerKind::Dense(Dense {
                inputs,
                outputs,
                weights,
                bias,
            })
        }
        tag => {
            return Err(CnnwError::UnknownTag {
                index,
                what: "layer type",
                tag,
            })
        }
    };
    Ok(LayerSpec {
        kind,
        activation,
        frozen,
    })
}

fn put_u32(out: &mut Vec<u8>, v: usize) {
    let v = u32::try_from(v).expect("dimension exceeds u32");
    out.extend_from_slice(&v.to_le_bytes());
}

fn put_f32s(out: &mut Vec<u8>, values: &[f32]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

pub fn save_weights(net: &Network) -> Vec<u8> {
    let mut out = Vec::new();
    out.extend_from_slice(&MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    put_u32(&mut out, net.layers().len());
    for spec in net.layers() {
        let type_tag = match spec.kind {
            LayerKind::Conv2d(_) => TAG_CONV,
            LayerKind::MaxPool(_) => TAG_POOL,
            LayerKind::Flatten => TAG_FLATTEN,
            LayerKind::Dense(_) => TAG_DENSE,
        };
        out.push(type_tag);
        out.push(spec.activation.tag());
        if let Activation::LeakyRelu(alpha) = spec.activation {
            out.extend_from_slice(&alpha.to_le_bytes());
        }
        out.push(u8::from(spec.frozen));
        match &spec.kind {
            LayerKind::Conv2d(c) => {
                for d in [c.filter, c.in_channels, c.out_channels, c.stride, c.pad] {
                    put_u32(&mut out, d);
                }
                put_f32s(&mut out, &c.kernel);
                put_f32s(&mut out, &c.bias);
            }
            LayerKind::MaxPool(p) => {
                put_u32(&mut out, p.size);
                put_u32(&mut out, p.stride);
            }
            LayerKind::Flatten => {}
            LayerKind::Dense(d) => {
                put_u32(&mut out, d.inputs);
                put_u32(&mut out, d.outputs);
                put_f32s(&mut out, &d.weights);
                put_f32s(&mut out, &d.bias);
            }
        }
    }
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Network {
        let mut conv = Conv2d::zeros(3, 3, 2, 1, 1);
        conv.kernel.iter_mut().enumerate().for_each(|(i, w)| *w = i as f32 * 0.01 - 0.2);
        conv.bias = vec![0.5, -0.5];
        let mut dense = Dense::zeros(2 * 2 * 2, 2);
        dense.weights.iter_mut().enumerate().for_each(|(i, w)| *w = (i as f32).sin());
        Network::new(vec![
            LayerSpec::conv(conv, Activation::LeakyRelu(0.1)).frozen(true),
            LayerSpec::max_pool(2, 2),
            LayerSpec::flatten(),
            LayerSpec::dense(dense, Activation::Softmax),
        ])
        .unwrap()
    }

    #[test]
    fn round_trip() {
        let net = sample();
        let bytes = save_weights(&net);
        let back = load_weights(&bytes).unwrap();
        assert_eq!(back.layers(), net.layers());
        assert_eq!(save_weights(&back), bytes);
    }

    #[test]
    fn header_layout() {
        let bytes = save_weights(&sample());
        assert_eq!(&bytes[..4], &[0x43, 0x4E, 0x4E, 0x57]);
        assert_eq!(&bytes[4..8], &1u32.to_le_bytes());
        assert_eq!(&bytes[8..12], &4u32.to_le_bytes());
        // conv tag, leaky relu tag, alpha, frozen
        assert_eq!(bytes[12], 1);
        assert_eq!(bytes[13], 2);
        assert_eq!(&bytes[14..18], &0.1f32.to_le_bytes());
        assert_eq!(bytes[18], 1);
    }

    #[test]
    fn distinct_errors() {
        let bytes = save_weights(&sample());

        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(matches!(load_weights(&bad), Err(CnnwError::BadMagic(_))));

        let mut bad = bytes.clone();
        bad[4] = 2;
        assert_eq!(load_weights(&bad), Err(CnnwError::UnsupportedVersion(2)));

        for cut in [0, 3, 10, 40, bytes.len() - 1] {
            assert!(matches!(load_weights(&bytes[..cut]), Err(CnnwError::Truncated { .. })), "cut {cut}");
        }

        let mut bad = bytes.clone();
        let n = bad.len();
        bad[n - 10] ^= 0xFF;
        assert!(matches!(load_weights(&bad), Err(CnnwError::ChecksumMismatch { .. })));

        let mut extra = bytes.clone();
        extra.push(0);
        assert_eq!(load_weights(&extra), Err(CnnwError::TrailingBytes(1)));
    }

    #[test]
    fn unknown_tags_and_inconsistent_layers() {
        let mut raw = Vec::new();
        raw.extend_from_slice(&MAGIC);
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.extend_from_slice(&[9, 0, 0]);
        let crc = crc32fast::hash(&raw);
        raw.extend_from_slice(&crc.to_le_bytes());
        assert!(matches!(load_weights(&raw), Err(CnnwError::UnknownTag { what: "layer type", tag: 9, .. })));

        // Dense with zero outputs parses but fails layer validation.
        let mut raw = Vec::new();
        raw.extend_from_slice(&MAGIC);
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.extend_from_slice(&[TAG_DENSE, 0, 0]);
        raw.extend_from_slice(&3u32.to_le_bytes());
        raw.extend_from_slice(&0u32.to_le_bytes());
        let crc = crc32fast::hash(&raw);
        raw.extend_from_slice(&crc.to_le_bytes());
        assert!(matches!(load_weights(&raw), Err(CnnwError::InconsistentLayer { index: 0, .. })));
    }

    #[test]
    fn huge_declared_dims_are_truncation_not_allocation() {
        let mut raw = Vec::new();
        raw.extend_from_slice(&MAGIC);
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.extend_from_slice(&1u32.to_le_bytes());
        raw.extend_from_slice(&[TAG_DENSE, 0, 0]);
        raw.extend_from_slice(&u32::MAX.to_le_bytes());
        raw.extend_from_slice(&u32::MAX.to_le_bytes());
        assert!(load_weights(&raw).is_err());
    }
}
