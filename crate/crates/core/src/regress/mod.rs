//! Tabular regression of fire-weather codes from raw weather.
//!
//! Features are standardized with population statistics; models remember
//! the scaler they were fitted with and reject rows scaled any other way.

mod dataset;
mod forest;
mod knn;
mod metrics;
mod model;
mod scale;
mod tree;

use thiserror::Error;

pub use dataset::{Matrix, TabularDataset, FWI_TARGETS, WEATHER_FEATURES};
pub use forest::{ForestParams, RandomForest};
pub use knn::{Distance, KnnRegressor};
pub use metrics::{correlation_matrix, mae, pearson, NamedMatrix};
pub use model::{evaluate, fit, run_study, MaeTable, RegressorKind, RegressorModel, ScaledDataset, StudyConfig};
pub use scale::{standardize, ScaledMatrix, ScalerParams};
pub use tree::{RegressionTree, TreeParams};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RegressError {
    #[error("dataset is empty")]
    Empty,
    #[error("need at least {needed} rows, got {actual}")]
    TooFewRows { needed: usize, actual: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("shape error: {0}")]
    Shape(String),
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("missing target column: {0}")]
    MissingTarget(String),
    #[error("invalid hyperparameter: {0}")]
    Param(String),
    #[error("rows were not scaled with this model's scaler")]
    ScalerMismatch,
}
