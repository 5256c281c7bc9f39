use super::dataset::Matrix;
use super::RegressError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Distance {
    #[default]
    Euclidean,
    Manhattan,
}

impl Distance {
    /// Monotone surrogate of the distance (squared for Euclidean).
    fn rank(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Self::Euclidean => a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum(),
            Self::Manhattan => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        }
    }
}

/// Brute-force k-nearest-neighbour regressor with uniform weights. Equal
/// distances are broken in favour of the lower training row.
#[derive(Debug, Clone, PartialEq)]
pub struct KnnRegressor {
    k: usize,
    distance: Distance,
    x: Matrix,
    y: Vec<f64>,
}

impl KnnRegressor {
    pub fn fit(x: &Matrix, y: &[f64], k: usize, distance: Distance) -> Result<Self, RegressError> {
        if x.rows() == 0 {
            return Err(RegressError::Empty);
        }
        if y.len() != x.rows() {
            return Err(RegressError::LengthMismatch {
                left: x.rows(),
                right: y.len(),
            });
        }
        if k == 0 || k > x.rows() {
            return Err(RegressError::Param(format!("k = {k} must lie in 1..={}", x.rows())));
        }
        Ok(Self {
            k,
            distance,
            x: x.clone(),
            y: y.to_vec(),
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn neighbours(&self, row: &[f64]) -> Vec<usize> {
        let mut d: Vec<(f64, usize)> = (0..self.x.rows())
            .map(|i| (self.distance.rank(self.x.row(i), row), i))
            .collect();
        let by = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < d.len() {
            d.select_nth_unstable_by(self.k - 1, by);
            d.truncate(self.k);
        }
        d.sort_by(by);
        d.into_iter().map(|(_, i)| i).collect()
    }

    pub fn predict_row(&self, row: &[f64]) -> f64 {
        self.neighbours(row).iter().map(|&i| self.y[i]).sum::<f64>() / self.k as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let m = KnnRegressor::fit(&Matrix::new(1, 2, vec![0.0, 0.0]).unwrap(), &[4.2], 1, Distance::Euclidean).unwrap();
        assert_eq!(m.predict_row(&[100.0, -3.0]), 4.2);
    }

    #[test]
    fn ties_prefer_lower_index() {
        let x = Matrix::new(3, 1, vec![1.0, -1.0, 1.0]).unwrap();
        let m = KnnRegressor::fit(&x, &[10.0, 20.0, 30.0], 1, Distance::Euclidean).unwrap();
        assert_eq!(m.neighbours(&[0.0]), vec![0]);
        let m = KnnRegressor::fit(&x, &[10.0, 20.0, 30.0], 2, Distance::Manhattan).unwrap();
        assert_eq!(m.neighbours(&[0.0]), vec![0, 1]);
    }

    #[test]
    fn k_bounds() {
        let x = Matrix::new(2, 1, vec![1.0, 2.0]).unwrap();
        assert!(KnnRegressor::fit(&x, &[1.0, 2.0], 3, Distance::Euclidean).is_err());
        assert!(KnnRegressor::fit(&x, &[1.0, 2.0], 0, Distance::Euclidean).is_err());
    }
}
