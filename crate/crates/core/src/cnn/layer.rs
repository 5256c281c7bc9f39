use rayon::prelude::*;

use super::activation::Activation;
use super::geometry::ConvGeometry;
use super::tensor::{Shape3, Tensor3};
use super::CnnError;

/// 2-D convolution layer.
///
/// The layer computes cross-correlation, the convention of every major deep
/// learning framework, so exported kernels load unchanged:
///
/// `out(i, j, o) = b[o] + Σ_{r,c,k} in(i·s + r − p, j·s + c − p, k) · K[r, c, k, o]`
///
/// Kernel storage is `(row, col, in_channel, out_channel)` with the output
/// channel varying fastest. Out-of-range input positions read as zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Conv2d {
    pub filter: usize,
    pub in_channels: usize,
    pub out_channels: usize,
    pub stride: usize,
    pub pad: usize,
    pub kernel: Vec<f32>,
    pub bias: Vec<f32>,
}

impl Conv2d {
    pub fn zeros(filter: usize, in_channels: usize, out_channels: usize, stride: usize, pad: usize) -> Self {
        Self {
            filter,
            in_channels,
            out_channels,
            stride,
            pad,
            kernel: vec![0.0; filter * filter * in_channels * out_channels],
            bias: vec![0.0; out_channels],
        }
    }

    pub fn kernel_len(&self) -> usize {
        self.filter * self.filter * self.in_channels * self.out_channels
    }

    #[inline]
    pub fn kernel_index(&self, row: usize, col: usize, in_channel: usize, out_channel: usize) -> usize {
        ((row * self.filter + col) * self.in_channels + in_channel) * self.out_channels + out_channel
    }

    pub fn param_count(&self) -> usize {
        self.kernel_len() + self.out_channels
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        if self.filter == 0 || self.stride == 0 || self.in_channels == 0 || self.out_channels == 0 {
            return Err("conv2d dimensions must be positive".into());
        }
        if self.kernel.len() != self.kernel_len() {
            return Err(format!("kernel has {} values, expected {}", self.kernel.len(), self.kernel_len()));
        }
        if self.bias.len() != self.out_channels {
            return Err(format!("bias has {} values, expected {}", self.bias.len(), self.out_channels));
        }
        Ok(())
    }

    pub fn output_shape(&self, input: Shape3) -> Result<Shape3, CnnError> {
        if input.channels != self.in_channels {
            return Err(CnnError::ChannelMismatch {
                expected: self.in_channels,
                actual: input.channels,
            });
        }
        let h = ConvGeometry::new(input.height, self.pad, self.filter, self.stride).out_size()?;
        let w = ConvGeometry::new(input.width, self.pad, self.filter, self.stride).out_size()?;
        Ok(Shape3::new(h, w, self.out_channels))
    }
}

/// Max pooling window. Pooling never pads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaxPool {
    pub size: usize,
    pub stride: usize,
}

impl MaxPool {
    pub fn output_shape(&self, input: Shape3) -> Result<Shape3, CnnError> {
        let h = ConvGeometry::new(input.height, 0, self.size, self.stride).out_size()?;
        let w = ConvGeometry::new(input.width, 0, self.size, self.stride).out_size()?;
        Ok(Shape3::new(h, w, input.channels))
    }
}

/// Fully connected layer, weights stored `(input, output)` with the output
/// index varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub weights: Vec<f32>,
    pub bias: Vec<f32>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self {
            inputs,
            outputs,
            weights: vec![0.0; inputs * outputs],
            bias: vec![0.0; outputs],
        }
    }

    pub fn param_count(&self) -> usize {
        self.inputs * self.outputs + self.outputs
    }

    pub(crate) fn check(&self) -> Result<(), String> {
        if self.inputs == 0 || self.outputs == 0 {
            return Err("dense dimensions must be positive".into());
        }
        if self.weights.len() != self.inputs * self.outputs {
            return Err(format!(
                "weights have {} values, expected {}",
                self.weights.len(),
                self.inputs * self.outputs
            ));
        }
        if self.bias.len() != self.outputs {
            return Err(format!("bias has {} values, expected {}", self.bias.len(), self.outputs));
        }
        Ok(())
    }
}

/// Convolution followed by bias and activation, lowered to a patch matrix
/// (im2col) times the kernel matrix one output row at a time.
pub fn conv2d(input: &Tensor3, layer: &Conv2d, activation: Activation) -> Result<Tensor3, CnnError> {
    layer.check().map_err(CnnError::InvalidLayer)?;
    let out_shape = layer.output_shape(input.shape())?;
    let patch_len = layer.filter * layer.filter * layer.in_channels;
    let row_len = out_shape.width * out_shape.channels;
    let mut out = vec![0f32; out_shape.len()];

    out.par_chunks_mut(row_len).enumerate().for_each(|(oi, out_row)| {
        let mut patch = vec![0f32; patch_len];
        let mut acc = vec![0f64; layer.out_channels];
        for oj in 0..out_shape.width {
            im2col_patch(input, layer, oi, oj, &mut patch);
            for (a, &b) in acc.iter_mut().zip(&layer.bias) {
                *a = f64::from(b);
            }
            for (p, &x) in patch.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                let x = f64::from(x);
                let weights = &layer.kernel[p * layer.out_channels..(p + 1) * layer.out_channels];
                for (a, &w) in acc.iter_mut().zip(weights) {
                    *a += x * f64::from(w);
                }
            }
            let cell = &mut out_row[oj * out_shape.channels..(oj + 1) * out_shape.channels];
            for (c, &a) in cell.iter_mut().zip(&acc) {
                *c = a as f32;
            }
            activation.apply(cell);
        }
    });
    Ok(Tensor3::from_raw(out_shape, out))
}

/// Fills `patch` with the receptive field of output pixel `(oi, oj)` in
/// `(row, col, channel)` order, zero where the window overhangs the input.
fn im2col_patch(input: &Tensor3, layer: &Conv2d, oi: usize, oj: usize, patch: &mut [f32]) {
    let channels = layer.in_channels;
    let (h, w) = (input.height() as isize, input.width() as isize);
    let mut p = 0;
    for r in 0..layer.filter {
        let y = (oi * layer.stride + r) as isize - layer.pad as isize;
        for c in 0..layer.filter {
            let x = (oj * layer.stride + c) as isize - layer.pad as isize;
            let dst = &mut patch[p..p + channels];
            if y < 0 || y >= h || x < 0 || x >= w {
                dst.fill(0.0);
            } else {
                let start = input.index(y as usize, x as usize, 0);
                dst.copy_from_slice(&input.data()[start..start + channels]);
            }
            p += channels;
        }
    }
}

/// Per-channel window maximum.
pub fn maxpool2d(input: &Tensor3, size: usize, stride: usize) -> Result<Tensor3, CnnError> {
    let pool = MaxPool { size, stride };
    let out_shape = pool.output_shape(input.shape())?;
    let mut out = Tensor3::zeros(out_shape);
    for oi in 0..out_shape.height {
        for oj in 0..out_shape.width {
            for k in 0..out_shape.channels {
                let mut best = f32::NEG_INFINITY;
                for r in 0..size {
                    for c in 0..size {
                        best = best.max(input.get(oi * stride + r, oj * stride + c, k));
                    }
                }
                out.set(oi, oj, k, best);
            }
        }
    }
    Ok(out)
}

/// Row-major `(row, col, channel)` flattening; the channel varies fastest.
pub fn flatten(input: &Tensor3) -> Vec<f32> {
    input.data().to_vec()
}

/// Inverse of [`flatten`].
pub fn unflatten(values: Vec<f32>, shape: Shape3) -> Result<Tensor3, CnnError> {
    Tensor3::new(shape, values)
}

/// `activation(Wᵀ·v + b)` with `f64` accumulation.
pub fn dense(v: &[f32], layer: &Dense, activation: Activation) -> Result<Vec<f32>, CnnError> {
    layer.check().map_err(CnnError::InvalidLayer)?;
    if v.len() != layer.inputs {
        return Err(CnnError::DimensionMismatch {
            expected: layer.inputs,
            actual: v.len(),
        });
    }
    let mut acc: Vec<f64> = layer.bias.iter().map(|&b| f64::from(b)).collect();
    for (i, &x) in v.iter().enumerate() {
        let x = f64::from(x);
        let row = &layer.weights[i * layer.outputs..(i + 1) * layer.outputs];
        for (a, &w) in acc.iter_mut().zip(row) {
            *a += x * f64::from(w);
        }
    }
    let mut out: Vec<f32> = acc.into_iter().map(|a| a as f32).collect();
    activation.apply(&mut out);
    Ok(out)
}
