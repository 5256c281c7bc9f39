use std::hash::{Hash, Hasher};

use super::dataset::Matrix;
use super::RegressError;

/// Per-feature standardization parameters (population standard deviation).
#[derive(Debug, Clone, PartialEq)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    /// Zero-variance columns; they standardize to 0.
    pub constant: Vec<bool>,
}

/// Features that went through a particular [`ScalerParams`].
///
/// Models refuse rows scaled with different parameters (or not at all).
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledMatrix {
    pub(crate) values: Matrix,
    pub(crate) fingerprint: u64,
}

impl ScaledMatrix {
    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }
}

impl ScalerParams {
    pub fn fit(x: &Matrix) -> Result<Self, RegressError> {
        let n = x.rows();
        if n == 0 {
            return Err(RegressError::Empty);
        }
        if n < 2 {
            return Err(RegressError::TooFewRows { needed: 2, actual: n });
        }
        let mut means = Vec::with_capacity(x.cols());
        let mut stds = Vec::with_capacity(x.cols());
        let mut constant = Vec::with_capacity(x.cols());
        for j in 0..x.cols() {
            let col = x.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
            let std = var.sqrt();
            let is_constant = col.iter().all(|&v| v == col[0]);
            means.push(mean);
            stds.push(if is_constant { 0.0 } else { std });
            constant.push(is_constant);
        }
        Ok(Self { means, stds, constant })
    }

    pub fn fingerprint(&self) -> u64 {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for v in self.means.iter().chain(&self.stds) {
            v.to_bits().hash(&mut h);
        }
        self.constant.hash(&mut h);
        h.finish()
    }

    pub fn transform(&self, x: &Matrix) -> Result<ScaledMatrix, RegressError> {
        if x.cols() != self.means.len() {
            return Err(RegressError::Shape(format!("expected {} features, got {}", self.means.len(), x.cols())));
        }
        let mut values = x.clone();
        let cols = x.cols();
        for (k, v) in values.data_mut().iter_mut().enumerate() {
            let j = k % cols;
            *v = if self.constant[j] { 0.0 } else { (*v - self.means[j]) / self.stds[j] };
        }
        Ok(ScaledMatrix {
            values,
            fingerprint: self.fingerprint(),
        })
    }

    /// Maps standardized values back to the original units. Constant columns
    /// come back as their mean.
    pub fn inverse_transform(&self, scaled: &ScaledMatrix) -> Result<Matrix, RegressError> {
        if scaled.fingerprint != self.fingerprint() {
            return Err(RegressError::ScalerMismatch);
        }
        let mut out = scaled.values.clone();
        let cols = out.cols();
        for (k, v) in out.data_mut().iter_mut().enumerate() {
            let j = k % cols;
            *v = if self.constant[j] { self.means[j] } else { *v * self.stds[j] + self.means[j] };
        }
        Ok(out)
    }
}

/// Fits scaler parameters on `x` and applies them.
pub fn standardize(x: &Matrix) -> Result<(ScaledMatrix, ScalerParams), RegressError> {
    let params = ScalerParams::fit(x)?;
    Ok((params.transform(x)?, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_case() {
        let x = Matrix::new(3, 2, vec![1.0, 5.0, 2.0, 5.0, 3.0, 5.0]).unwrap();
        let (s, p) = standardize(&x).unwrap();
        let expected = 1.5f64.sqrt();
        assert!((s.values().get(0, 0) + expected).abs() < 1e-12);
        assert_eq!(s.values().get(1, 0), 0.0);
        assert!((s.values().get(2, 0) - expected).abs() < 1e-12);
        assert_eq!(s.values().column(1), vec![0.0, 0.0, 0.0]);
        assert_eq!(p.constant, vec![false, true]);
        assert_eq!(p.transform(&x).unwrap(), s);
    }

    #[test]
    fn needs_two_rows() {
        assert!(matches!(ScalerParams::fit(&Matrix::new(0, 2, vec![]).unwrap()), Err(RegressError::Empty)));
        assert!(matches!(
            ScalerParams::fit(&Matrix::new(1, 2, vec![1.0, 2.0]).unwrap()),
            Err(RegressError::TooFewRows { .. })
        ));
    }
}
