use super::dataset::TabularDataset;
use super::RegressError;

/// Mean absolute error, `(1/N)·Σ|yᵢ − ŷᵢ|`.
pub fn mae(y: &[f64], yhat: &[f64]) -> Result<f64, RegressError> {
    if y.len() != yhat.len() {
        return Err(RegressError::LengthMismatch {
            left: y.len(),
            right: yhat.len(),
        });
    }
    if y.is_empty() {
        return Err(RegressError::Empty);
    }
    Ok(y.iter().zip(yhat).map(|(a, b)| (a - b).abs()).sum::<f64>() / y.len() as f64)
}

/// Pearson coefficient, `None` when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<Option<f64>, RegressError> {
    if x.len() != y.len() {
        return Err(RegressError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(RegressError::TooFewRows {
            needed: 2,
            actual: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(None);
    }
    Ok(Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0)))
}

/// Square matrix with named rows and columns. `None` marks an undefined
/// coefficient (a zero-variance column).
#[derive(Debug, Clone, PartialEq)]
pub struct NamedMatrix {
    pub names: Vec<String>,
    pub values: Vec<Vec<Option<f64>>>,
}

impl NamedMatrix {
    pub fn get(&self, a: &str, b: &str) -> Option<Option<f64>> {
        let i = self.names.iter().position(|n| n == a)?;
        let j = self.names.iter().position(|n| n == b)?;
        Some(self.values[i][j])
    }

    /// CSV with a leading `name` column; undefined entries are written `NA`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("name");
        for n in &self.names {
            out.push(',');
            out.push_str(n);
        }
        out.push('\n');
        for (name, row) in self.names.iter().zip(&self.values) {
            out.push_str(name);
            for v in row {
                match v {
                    Some(v) => out.push_str(&format!(",{v:.4}")),
                    None => out.push_str(",NA"),
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Pearson correlation between all feature columns, and optionally the
/// targets as well.
pub fn correlation_matrix(data: &TabularDataset, include_targets: bool) -> Result<NamedMatrix, RegressError> {
    if data.len() < 2 {
        return Err(RegressError::TooFewRows {
            needed: 2,
            actual: data.len(),
        });
    }
    let mut names = data.feature_names.clone();
    let mut columns: Vec<Vec<f64>> = (0..data.features.cols()).map(|j| data.features.column(j)).collect();
    if include_targets {
        names.extend(data.target_names.iter().cloned());
        columns.extend((0..data.targets.cols()).map(|j| data.targets.column(j)));
    }
    let k = columns.len();
    let mut values = vec![vec![None; k]; k];
    for i in 0..k {
        for j in i..k {
            let r = if i == j {
                pearson(&columns[i], &columns[j])?.map(|_| 1.0)
            } else {
                pearson(&columns[i], &columns[j])?
            };
            values[i][j] = r;
            values[j][i] = r;
        }
    }
    Ok(NamedMatrix { names, values })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mae_hand_cases() {
        assert_eq!(mae(&[1.0, 2.0], &[1.0, 4.0]).unwrap(), 1.0);
        assert_eq!(mae(&[0.0, 0.0, 0.0], &[1.0, -2.0, 3.0]).unwrap(), 2.0);
        assert_eq!(mae(&[3.5, -1.0], &[3.5, -1.0]).unwrap(), 0.0);
        assert!(matches!(mae(&[1.0], &[1.0, 2.0]), Err(RegressError::LengthMismatch { .. })));
        assert!(matches!(mae(&[], &[]), Err(RegressError::Empty)));
    }

    #[test]
    fn pearson_cases() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), Some(1.0));
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]).unwrap(), Some(-1.0));
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]).unwrap(), None);
    }
}
