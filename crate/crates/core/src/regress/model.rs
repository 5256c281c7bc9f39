use super::dataset::{Matrix, TabularDataset};
use super::forest::{ForestParams, RandomForest};
use super::knn::{Distance, KnnRegressor};
use super::metrics::mae;
use super::scale::{ScaledMatrix, ScalerParams};
use super::RegressError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegressorKind {
    Knn { k: usize, distance: Distance },
    RandomForest(ForestParams),
}

impl RegressorKind {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Knn { .. } => "KNN",
            Self::RandomForest(_) => "RF",
        }
    }
}

/// A dataset together with its standardized features.
#[derive(Debug, Clone)]
pub struct ScaledDataset {
    pub data: TabularDataset,
    pub scaled: ScaledMatrix,
    pub scaler: ScalerParams,
}

impl ScaledDataset {
    /// Fits a scaler on `data` and applies it.
    pub fn standardize(data: TabularDataset) -> Result<Self, RegressError> {
        let scaler = ScalerParams::fit(&data.features)?;
        Self::with_scaler(data, scaler)
    }

    /// Applies previously fitted parameters, e.g. the training scaler to a
    /// test split.
    pub fn with_scaler(data: TabularDataset, scaler: ScalerParams) -> Result<Self, RegressError> {
        let scaled = scaler.transform(&data.features)?;
        Ok(Self { data, scaled, scaler })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Fitted {
    Knn(KnnRegressor),
    Forest(RandomForest),
}

/// A fitted regressor for one target column. Immutable after fitting.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressorModel {
    kind: RegressorKind,
    target: String,
    scaler: ScalerParams,
    fitted: Fitted,
}

pub fn fit(kind: &RegressorKind, train: &ScaledDataset, target: &str) -> Result<RegressorModel, RegressError> {
    let y = train.data.target(target)?;
    let x = train.scaled.values();
    let fitted = match *kind {
        RegressorKind::Knn { k, distance } => {
            if k > x.rows() {
                return Err(RegressError::Param(format!("k = {k} exceeds {} training rows", x.rows())));
            }
            Fitted::Knn(KnnRegressor::fit(x, &y, k, distance)?)
        }
        RegressorKind::RandomForest(params) => Fitted::Forest(RandomForest::fit(x, &y, &params)?),
    };
    Ok(RegressorModel {
        kind: *kind,
        target: target.to_string(),
        scaler: train.scaler.clone(),
        fitted,
    })
}

impl RegressorModel {
    pub fn kind(&self) -> &RegressorKind {
        &self.kind
    }

    pub fn target(&self) -> &str {
        &self.target
    }

    pub fn scaler(&self) -> &ScalerParams {
        &self.scaler
    }

    pub fn forest(&self) -> Option<&RandomForest> {
        match &self.fitted {
            Fitted::Forest(f) => Some(f),
            Fitted::Knn(_) => None,
        }
    }

    /// Predicts rows that were scaled with this model's own parameters.
    pub fn predict(&self, rows: &ScaledMatrix) -> Result<Vec<f64>, RegressError> {
        if rows.fingerprint() != self.scaler.fingerprint() {
            return Err(RegressError::ScalerMismatch);
        }
        let x = rows.values();
        if x.cols() != self.scaler.means.len() {
            return Err(RegressError::Shape(format!("expected {} features, got {}", self.scaler.means.len(), x.cols())));
        }
        Ok((0..x.rows())
            .map(|i| match &self.fitted {
                Fitted::Knn(m) => m.predict_row(x.row(i)),
                Fitted::Forest(f) => f.predict_row(x.row(i)),
            })
            .collect())
    }

    /// Scales raw features with the stored parameters, then predicts.
    pub fn predict_raw(&self, features: &Matrix) -> Result<Vec<f64>, RegressError> {
        self.predict(&self.scaler.transform(features)?)
    }
}

/// Regressor × target table of mean absolute errors.
#[derive(Debug, Clone, PartialEq)]
pub struct MaeTable {
    pub regressors: Vec<String>,
    pub targets: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

impl MaeTable {
    pub fn get(&self, regressor: &str, target: &str) -> Option<f64> {
        let i = self.regressors.iter().position(|r| r == regressor)?;
        let j = self.targets.iter().position(|t| t == target)?;
        Some(self.values[i][j])
    }

    /// `regressor,<target>_mae,...` with four decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("regressor");
        for t in &self.targets {
            out.push_str(&format!(",{}_mae", t.to_lowercase()));
        }
        out.push('\n');
        for (name, row) in self.regressors.iter().zip(&self.values) {
            out.push_str(name);
            for v in row {
                out.push_str(&format!(",{v:.4}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Scores each regressor's per-target models on `test`.
pub fn evaluate(
    targets: &[&str],
    regressors: &[(String, Vec<RegressorModel>)],
    test: &TabularDataset,
) -> Result<MaeTable, RegressError> {
    let mut values = Vec::with_capacity(regressors.len());
    for (name, models) in regressors {
        let mut row = Vec::with_capacity(targets.len());
        for &target in targets {
            let model = models
                .iter()
                .find(|m| m.target == target)
                .ok_or_else(|| RegressError::MissingTarget(format!("{name} has no model for {target}")))?;
            let y = test.target(target)?;
            row.push(mae(&y, &model.predict_raw(&test.features)?)?);
        }
        values.push(row);
    }
    Ok(MaeTable {
        regressors: regressors.iter().map(|(n, _)| n.clone()).collect(),
        targets: targets.iter().map(|t| t.to_string()).collect(),
        values,
    })
}

/// Settings for the full split → scale → fit → score study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub train_fraction: f64,
    pub split_seed: u64,
    pub regressors: Vec<RegressorKind>,
}

impl Default for StudyConfig {
    fn default() -> Self {
        Self {
            train_fraction: 0.8,
            split_seed: 0,
            regressors: vec![
                RegressorKind::RandomForest(ForestParams::default()),
                RegressorKind::Knn {
                    k: 5,
                    distance: Distance::Euclidean,
                },
            ],
        }
    }
}

pub fn run_study(data: &TabularDataset, targets: &[&str], cfg: &StudyConfig) -> Result<MaeTable, RegressError> {
    let (train, test) = data.train_test_split(cfg.train_fraction, cfg.split_seed)?;
    let train = ScaledDataset::standardize(train)?;
    let mut rows = Vec::new();
    for kind in &cfg.regressors {
        let models = targets
            .iter()
            .map(|t| fit(kind, &train, t))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((kind.label().to_string(), models));
    }
    evaluate(targets, &rows, &test)
}
