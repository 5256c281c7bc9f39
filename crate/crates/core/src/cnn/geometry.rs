//! Output-size arithmetic for sliding windows.
//!
//! `n_out = ⌊(n_in + 2p − f) / s⌋ + 1` and its inverse for the window size,
//! `f = n_in + 2p − s·(n_out − 1)`.

use serde::{Deserialize, Serialize};

use super::CnnError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConvGeometry {
    /// Input height or width.
    pub n_in: usize,
    pub pad: usize,
    pub filter: usize,
    pub stride: usize,
}

impl ConvGeometry {
    pub const fn new(n_in: usize, pad: usize, filter: usize, stride: usize) -> Self {
        Self {
            n_in,
            pad,
            filter,
            stride,
        }
    }

    fn validate(&self) -> Result<usize, CnnError> {
        if self.filter == 0 || self.stride == 0 || self.n_in == 0 {
            return Err(CnnError::InvalidGeometry(*self));
        }
        let padded = self.n_in + 2 * self.pad;
        if self.filter > padded {
            return Err(CnnError::InvalidGeometry(*self));
        }
        Ok(padded - self.filter)
    }

    /// Output size with floor division.
    pub fn out_size(&self) -> Result<usize, CnnError> {
        Ok(self.validate()? / self.stride + 1)
    }

    /// Output size, rejecting geometries where the window does not land
    /// exactly on the padded edge.
    pub fn out_size_strict(&self) -> Result<usize, CnnError> {
        let span = self.validate()?;
        if span % self.stride != 0 {
            return Err(CnnError::NotDivisible(*self));
        }
        Ok(span / self.stride + 1)
    }
}

pub fn out_size(g: ConvGeometry) -> Result<usize, CnnError> {
    g.out_size()
}

/// Window size that maps `n_in` to `n_out` with the given padding and stride.
pub fn filter_size(n_in: usize, pad: usize, stride: usize, n_out: usize) -> Result<usize, CnnError> {
    let bad = CnnError::NoFilter {
        n_in,
        pad,
        stride,
        n_out,
    };
    if n_out == 0 || stride == 0 {
        return Err(bad);
    }
    let padded = (n_in + 2 * pad) as i64;
    let f = padded - (stride as i64) * (n_out as i64 - 1);
    if f < 1 {
        return Err(bad);
    }
    Ok(f as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooling_transition() {
        assert_eq!(out_size(ConvGeometry::new(350, 0, 2, 2)).unwrap(), 175);
        assert_eq!(filter_size(350, 0, 2, 175).unwrap(), 2);
    }

    #[test]
    fn same_padding_and_full_extent() {
        assert_eq!(out_size(ConvGeometry::new(350, 1, 3, 1)).unwrap(), 350);
        assert_eq!(out_size(ConvGeometry::new(10, 0, 10, 1)).unwrap(), 1);
        assert_eq!(filter_size(10, 0, 1, 1).unwrap(), 10);
    }

    #[test]
    fn floor_versus_strict() {
        let g = ConvGeometry::new(175, 0, 2, 2);
        assert_eq!(g.out_size().unwrap(), 87);
        assert!(matches!(g.out_size_strict(), Err(CnnError::NotDivisible(_))));
        assert_eq!(ConvGeometry::new(350, 0, 2, 2).out_size_strict().unwrap(), 175);
    }

    #[test]
    fn invalid() {
        assert!(out_size(ConvGeometry::new(4, 0, 5, 1)).is_err());
        assert!(out_size(ConvGeometry::new(4, 1, 5, 0)).is_err());
        assert!(filter_size(4, 0, 1, 10).is_err());
        assert!(filter_size(4, 0, 1, 0).is_err());
    }
}
