//! Forward-pass CNN engine.
//!
//! Tensors are `f32`; dot products accumulate in `f64`. Networks are
//! immutable once compiled and [`CompiledNetwork::forward`] is reentrant, so
//! tiles can be scored concurrently.

mod activation;
pub mod cnnw;
pub mod fixture;
mod geometry;
mod layer;
mod network;
mod signal;
mod tensor;

use thiserror::Error;

pub use activation::{leaky_relu, relu, sigmoid, softmax, tanh, Activation};
pub use cnnw::{load_weights, save_weights, CnnwError};
pub use geometry::{filter_size, out_size, ConvGeometry};
pub use layer::{conv2d, dense, flatten, maxpool2d, unflatten, Conv2d, Dense, MaxPool};
pub use network::{
    default_labels, vgg19, ActShape, ClassScores, CompiledNetwork, HeadKind, LayerKind, LayerSpec, Network,
    ParamCount, NO_WILDFIRE, WILDFIRE,
};
pub use signal::{conv1d, convolve2d, Plane, Signal1D};
pub use tensor::{Shape3, Tensor3};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CnnError {
    #[error("signal must be non-empty")]
    EmptySignal,
    #[error("tensor shape {0} has a zero dimension")]
    EmptyTensor(Shape3),
    #[error("expected {expected} values, got {actual}")]
    DataLength { expected: usize, actual: usize },
    #[error("non-finite value at index {0}")]
    NonFinite(usize),
    #[error("invalid window geometry {0:?}")]
    InvalidGeometry(ConvGeometry),
    #[error("window does not tile the padded input exactly: {0:?}")]
    NotDivisible(ConvGeometry),
    #[error("no positive filter size maps {n_in} (pad {pad}, stride {stride}) to {n_out}")]
    NoFilter {
        n_in: usize,
        pad: usize,
        stride: usize,
        n_out: usize,
    },
    #[error("kernel expects {expected} input channels, input has {actual}")]
    ChannelMismatch { expected: usize, actual: usize },
    #[error("layer expects {expected} inputs, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid layer: {0}")]
    InvalidLayer(String),
    #[error("layer {index}: {reason}")]
    Build { index: usize, reason: String },
    #[error("network must end in a sigmoid or softmax vector output")]
    NotProbabilistic,
    #[error("{labels} labels for {classes} classes")]
    LabelCount { labels: usize, classes: usize },
    #[error("input shape {actual} does not match network input {expected}")]
    InputShape { expected: Shape3, actual: Shape3 },
}
