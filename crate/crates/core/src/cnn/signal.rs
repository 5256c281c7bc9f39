//! Discrete convolution on finite supports.
//!
//! These are the textbook (kernel-flipped) operations. Network layers use
//! cross-correlation instead; see [`super::conv2d`].

use super::CnnError;

/// A finite discrete signal `x[n]` supported on `start..start + len`.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal1D {
    pub start: i64,
    pub samples: Vec<f64>,
}

impl Signal1D {
    pub fn new(samples: Vec<f64>) -> Self {
        Self { start: 0, samples }
    }

    pub fn with_start(start: i64, samples: Vec<f64>) -> Self {
        Self { start, samples }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Value at index `n`, zero outside the support.
    pub fn at(&self, n: i64) -> f64 {
        let offset = n - self.start;
        if offset < 0 {
            return 0.0;
        }
        self.samples.get(offset as usize).copied().unwrap_or(0.0)
    }
}

/// Full convolution `y[n] = Σₖ x[k]·h[n−k]`.
///
/// The result has length `len(x) + len(h) − 1` and starts at
/// `x.start + h.start`.
pub fn conv1d(x: &Signal1D, h: &Signal1D) -> Result<Signal1D, CnnError> {
    if x.is_empty() || h.is_empty() {
        return Err(CnnError::EmptySignal);
    }
    let mut out = vec![0.0; x.len() + h.len() - 1];
    for (i, &xv) in x.samples.iter().enumerate() {
        for (j, &hv) in h.samples.iter().enumerate() {
            out[i + j] += xv * hv;
        }
    }
    Ok(Signal1D::with_start(x.start + h.start, out))
}

/// Single-channel 2-D plane, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, CnnError> {
        if rows == 0 || cols == 0 {
            return Err(CnnError::EmptySignal);
        }
        if data.len() != rows * cols {
            return Err(CnnError::DataLength {
                expected: rows * cols,
                actual: data.len(),
            });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// Full 2-D convolution `S(i,j) = Σₘ Σₙ I(m,n)·K(i−m, j−n)`.
///
/// Output is `(rows_I + rows_K − 1) × (cols_I + cols_K − 1)`.
pub fn convolve2d(image: &Plane, kernel: &Plane) -> Plane {
    let rows = image.rows + kernel.rows - 1;
    let cols = image.cols + kernel.cols - 1;
    let mut data = vec![0.0; rows * cols];
    for m in 0..image.rows {
        for n in 0..image.cols {
            let iv = image.get(m, n);
            for a in 0..kernel.rows {
                let row = &mut data[(m + a) * cols..];
                for b in 0..kernel.cols {
                    row[n + b] += iv * kernel.get(a, b);
                }
            }
        }
    }
    Plane { rows, cols, data }
}
