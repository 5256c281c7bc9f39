use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::RegressError;
use crate::fwi::{FwiReport, WeatherObservation};

/// Row-major dense matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self, RegressError> {
        if data.len() != rows * cols {
            return Err(RegressError::Shape(format!("{rows}x{cols} matrix needs {} values, got {}", rows * cols, data.len())));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, RegressError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(RegressError::Shape("ragged rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub(crate) fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }
}

/// Feature matrix plus named targets for the weather regression study.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset {
    pub feature_names: Vec<String>,
    pub features: Matrix,
    pub target_names: Vec<String>,
    pub targets: Matrix,
    pub row_ids: Vec<String>,
}

pub const WEATHER_FEATURES: [&str; 4] = ["temp", "rh", "wind", "rain"];
pub const FWI_TARGETS: [&str; 4] = ["FFMC", "DMC", "DC", "ISI"];

impl TabularDataset {
    pub fn new(
        feature_names: Vec<String>,
        features: Matrix,
        target_names: Vec<String>,
        targets: Matrix,
        row_ids: Vec<String>,
    ) -> Result<Self, RegressError> {
        if features.rows() == 0 {
            return Err(RegressError::Empty);
        }
        if features.cols() != feature_names.len() || targets.cols() != target_names.len() {
            return Err(RegressError::Shape("column names do not match matrix widths".into()));
        }
        if targets.rows() != features.rows() || row_ids.len() != features.rows() {
            return Err(RegressError::Shape("features, targets and row ids differ in length".into()));
        }
        let mut names: Vec<&String> = feature_names.iter().chain(&target_names).collect();
        names.sort();
        if let Some(w) = names.windows(2).find(|w| w[0] == w[1]) {
            return Err(RegressError::DuplicateColumn(w[0].clone()));
        }
        if let Some(pos) = features.data.iter().chain(&targets.data).position(|v| !v.is_finite()) {
            return Err(RegressError::NonFinite(pos));
        }
        Ok(Self {
            feature_names,
            features,
            target_names,
            targets,
            row_ids,
        })
    }

    /// Weather features (temp, rh, wind, rain) against FFMC, DMC, DC and ISI.
    pub fn from_weather(observations: &[WeatherObservation], reports: &[FwiReport]) -> Result<Self, RegressError> {
        if observations.len() != reports.len() {
            return Err(RegressError::Shape("one FWI report per observation required".into()));
        }
        let mut f = Vec::with_capacity(observations.len() * 4);
        let mut t = Vec::with_capacity(observations.len() * 4);
        for (o, r) in observations.iter().zip(reports) {
            f.extend_from_slice(&[o.temp_c, o.rh_pct, o.wind_kmh, o.rain_mm]);
            t.extend_from_slice(&[r.state.ffmc, r.state.dmc, r.state.dc, r.isi]);
        }
        let n = observations.len();
        Self::new(
            WEATHER_FEATURES.iter().map(|s| s.to_string()).collect(),
            Matrix::new(n, 4, f)?,
            FWI_TARGETS.iter().map(|s| s.to_string()).collect(),
            Matrix::new(n, 4, t)?,
            observations.iter().map(|o| o.date.to_string()).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.features.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn target(&self, name: &str) -> Result<Vec<f64>, RegressError> {
        let j = self
            .target_names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| RegressError::MissingTarget(name.to_string()))?;
        Ok(self.targets.column(j))
    }

    pub fn subset(&self, idx: &[usize]) -> Self {
        Self {
            feature_names: self.feature_names.clone(),
            features: self.features.select_rows(idx),
            target_names: self.target_names.clone(),
            targets: self.targets.select_rows(idx),
            row_ids: idx.iter().map(|&i| self.row_ids[i].clone()).collect(),
        }
    }

    /// Seeded shuffle, then the first `⌊N·train_fraction⌋` rows train.
    pub fn train_test_split(&self, train_fraction: f64, seed: u64) -> Result<(Self, Self), RegressError> {
        if !(0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 {
            return Err(RegressError::Param(format!("train fraction {train_fraction} outside (0, 1)")));
        }
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let n_train = (self.len() as f64 * train_fraction).floor() as usize;
        if n_train == 0 || n_train == self.len() {
            return Err(RegressError::Param(format!("{} rows cannot be split at {train_fraction}", self.len())));
        }
        Ok((self.subset(&idx[..n_train]), self.subset(&idx[n_train..])))
    }
}
