use serde::{Deserialize, Serialize};

use super::activation::Activation;
use super::layer::{self, Conv2d, Dense, MaxPool};
use super::tensor::{Shape3, Tensor3};
use super::CnnError;

pub const WILDFIRE: &str = "Wildfire";
pub const NO_WILDFIRE: &str = "NoWildfire";

#[derive(Debug, Clone, PartialEq)]
pub enum LayerKind {
    Conv2d(Conv2d),
    MaxPool(MaxPool),
    Flatten,
    Dense(Dense),
}

impl LayerKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Conv2d(_) => "conv2d",
            Self::MaxPool(_) => "maxpool",
            Self::Flatten => "flatten",
            Self::Dense(_) => "dense",
        }
    }

    pub fn param_count(&self) -> usize {
        match self {
            Self::Conv2d(c) => c.param_count(),
            Self::Dense(d) => d.param_count(),
            Self::MaxPool(_) | Self::Flatten => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerSpec {
    pub kind: LayerKind,
    pub activation: Activation,
    /// Frozen layers are excluded from the trainable parameter count.
    pub frozen: bool,
}

impl LayerSpec {
    pub fn conv(conv: Conv2d, activation: Activation) -> Self {
        Self {
            kind: LayerKind::Conv2d(conv),
            activation,
            frozen: false,
        }
    }

    pub fn max_pool(size: usize, stride: usize) -> Self {
        Self {
            kind: LayerKind::MaxPool(MaxPool { size, stride }),
            activation: Activation::None,
            frozen: false,
        }
    }

    pub fn flatten() -> Self {
        Self {
            kind: LayerKind::Flatten,
            activation: Activation::None,
            frozen: false,
        }
    }

    pub fn dense(dense: Dense, activation: Activation) -> Self {
        Self {
            kind: LayerKind::Dense(dense),
            activation,
            frozen: false,
        }
    }

    pub fn frozen(mut self, frozen: bool) -> Self {
        self.frozen = frozen;
        self
    }
}

/// Shape of an intermediate activation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ActShape {
    Map(Shape3),
    Vector(usize),
}

impl std::fmt::Display for ActShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Map(s) => write!(f, "{s}"),
            Self::Vector(n) => write!(f, "({n})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ParamCount {
    pub total: usize,
    pub trainable: usize,
}

/// Ordered layer stack with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    pub name: String,
    layers: Vec<LayerSpec>,
    labels: Vec<String>,
}

impl Network {
    /// Checks every layer's parameter arrays against its declared dimensions.
    pub fn new(layers: Vec<LayerSpec>) -> Result<Self, CnnError> {
        for (index, spec) in layers.iter().enumerate() {
            let check = match &spec.kind {
                LayerKind::Conv2d(c) => c.check(),
                LayerKind::Dense(d) => d.check(),
                LayerKind::MaxPool(p) if p.size == 0 || p.stride == 0 => Err("pool size and stride must be positive".into()),
                _ => Ok(()),
            };
            check.map_err(|reason| CnnError::Build { index, reason })?;
        }
        Ok(Self {
            name: String::from("network"),
            layers,
            labels: Vec::new(),
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        self.labels = labels;
        self
    }

    pub fn layers(&self) -> &[LayerSpec] {
        &self.layers
    }

    pub fn count_params(&self) -> ParamCount {
        self.layers.iter().fold(ParamCount::default(), |acc, spec| {
            let n = spec.kind.param_count();
            ParamCount {
                total: acc.total + n,
                trainable: acc.trainable + if spec.frozen { 0 } else { n },
            }
        })
    }

    /// Propagates `input` through every layer, returning the output shape of
    /// each in order.
    pub fn shape_chain(&self, input: Shape3) -> Result<Vec<ActShape>, CnnError> {
        let mut current = ActShape::Map(input);
        let mut chain = Vec::with_capacity(self.layers.len());
        for (index, spec) in self.layers.iter().enumerate() {
            let wrap = |e: CnnError| CnnError::Build {
                index,
                reason: format!("{} on input {current}: {e}", spec.kind.name()),
            };
            current = match (&spec.kind, current) {
                (LayerKind::Conv2d(c), ActShape::Map(s)) => ActShape::Map(c.output_shape(s).map_err(wrap)?),
                (LayerKind::MaxPool(p), ActShape::Map(s)) => ActShape::Map(p.output_shape(s).map_err(wrap)?),
                (LayerKind::Flatten, ActShape::Map(s)) => ActShape::Vector(s.len()),
                (LayerKind::Flatten, v @ ActShape::Vector(_)) => v,
                (LayerKind::Dense(d), ActShape::Vector(n)) => {
                    if n != d.inputs {
                        return Err(wrap(CnnError::DimensionMismatch {
                            expected: d.inputs,
                            actual: n,
                        }));
                    }
                    ActShape::Vector(d.outputs)
                }
                (kind, shape) => {
                    return Err(CnnError::Build {
                        index,
                        reason: format!("{} cannot consume input of shape {shape}", kind.name()),
                    })
                }
            };
            chain.push(current);
        }
        Ok(chain)
    }

    /// Binds the network to an input shape, validating the whole layer chain
    /// and the probability head up front so that [`forward`] cannot fail
    /// partway through.
    pub fn compile(self, input: Shape3) -> Result<CompiledNetwork, CnnError> {
        let shapes = self.shape_chain(input)?;
        let (head, classes) = match (self.layers.last(), shapes.last()) {
            (Some(last), Some(&ActShape::Vector(n))) => match last.activation {
                Activation::Softmax => (HeadKind::Softmax, n),
                Activation::Sigmoid => (HeadKind::Sigmoid, n),
                _ => return Err(CnnError::NotProbabilistic),
            },
            _ => return Err(CnnError::NotProbabilistic),
        };
        let labels = if self.labels.is_empty() {
            default_labels(classes)
        } else if self.labels.len() == classes {
            self.labels.clone()
        } else {
            return Err(CnnError::LabelCount {
                labels: self.labels.len(),
                classes,
            });
        };
        Ok(CompiledNetwork {
            input,
            shapes,
            head,
            labels,
            network: self,
        })
    }
}

pub fn default_labels(classes: usize) -> Vec<String> {
    if classes == 2 {
        vec![NO_WILDFIRE.to_string(), WILDFIRE.to_string()]
    } else {
        (0..classes).map(|i| format!("class_{i}")).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeadKind {
    /// Scores sum to one.
    Softmax,
    /// One independent probability per class.
    Sigmoid,
}

/// Network whose shape chain has been verified for one input shape.
#[derive(Debug, Clone)]
pub struct CompiledNetwork {
    network: Network,
    input: Shape3,
    shapes: Vec<ActShape>,
    head: HeadKind,
    labels: Vec<String>,
}

impl CompiledNetwork {
    pub fn network(&self) -> &Network {
        &self.network
    }

    pub fn input_shape(&self) -> Shape3 {
        self.input
    }

    pub fn shapes(&self) -> &[ActShape] {
        &self.shapes
    }

    pub fn head(&self) -> HeadKind {
        self.head
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Position of the burn class: the `Wildfire` label if present, else
    /// the last class.
    pub fn burn_index(&self) -> usize {
        self.labels
            .iter()
            .position(|l| l == WILDFIRE)
            .unwrap_or(self.labels.len() - 1)
    }

    pub fn forward(&self, input: &Tensor3) -> Result<ClassScores, CnnError> {
        if input.shape() != self.input {
            return Err(CnnError::InputShape {
                expected: self.input,
                actual: input.shape(),
            });
        }
        let mut act = Act::Map(input.clone());
        for spec in self.network.layers() {
            act = match (&spec.kind, act) {
                (LayerKind::Conv2d(c), Act::Map(t)) => Act::Map(layer::conv2d(&t, c, spec.activation)?),
                (LayerKind::MaxPool(p), Act::Map(t)) => {
                    let mut out = layer::maxpool2d(&t, p.size, p.stride)?;
                    apply_map(&mut out, spec.activation);
                    Act::Map(out)
                }
                (LayerKind::Flatten, Act::Map(t)) => {
                    let mut v = layer::flatten(&t);
                    spec.activation.apply(&mut v);
                    Act::Vector(v)
                }
                (LayerKind::Flatten, Act::Vector(mut v)) => {
                    spec.activation.apply(&mut v);
                    Act::Vector(v)
                }
                (LayerKind::Dense(d), Act::Vector(v)) => Act::Vector(layer::dense(&v, d, spec.activation)?),
                _ => unreachable!("shape chain verified at compile time"),
            };
        }
        match act {
            Act::Vector(probabilities) => Ok(ClassScores {
                labels: self.labels.clone(),
                probabilities,
                head: self.head,
                burn_index: self.burn_index(),
            }),
            Act::Map(_) => unreachable!("head verified at compile time"),
        }
    }
}

enum Act {
    Map(Tensor3),
    Vector(Vec<f32>),
}

fn apply_map(t: &mut Tensor3, activation: Activation) {
    if activation == Activation::None {
        return;
    }
    let c = t.channels();
    for cell in t.data_mut().chunks_mut(c) {
        activation.apply(cell);
    }
}

/// Per-class probabilities from a network head.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub labels: Vec<String>,
    pub probabilities: Vec<f32>,
    pub head: HeadKind,
    pub burn_index: usize,
}

impl ClassScores {
    pub fn score(&self, label: &str) -> Option<f32> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probabilities[i])
    }

    /// Probability that the tile shows burnt forest.
    pub fn p_burn(&self) -> f64 {
        f64::from(self.probabilities[self.burn_index]).clamp(0.0, 1.0)
    }

    pub fn argmax(&self) -> usize {
        self.probabilities
            .iter()
            .enumerate()
            .fold((0, f32::NEG_INFINITY), |best, (i, &p)| if p > best.1 { (i, p) } else { best })
            .0
    }
}

/// The VGG19 convolutional base (16 conv layers, 5 pools) with a flatten and
/// a dense head sized for `input`. Weights are zero; the base is frozen so
/// only the head counts as trainable.
pub fn vgg19(input: Shape3, classes: usize, head: Activation) -> Result<Network, CnnError> {
    const BLOCKS: [(usize, usize); 5] = [(2, 64), (2, 128), (4, 256), (4, 512), (4, 512)];
    let mut layers = Vec::new();
    let mut channels = input.channels;
    let (mut h, mut w) = (input.height, input.width);
    for (convs, width) in BLOCKS {
        for _ in 0..convs {
            layers.push(LayerSpec::conv(Conv2d::zeros(3, channels, width, 1, 1), Activation::Relu).frozen(true));
            channels = width;
        }
        layers.push(LayerSpec::max_pool(2, 2).frozen(true));
        h /= 2;
        w /= 2;
    }
    layers.push(LayerSpec::flatten().frozen(true));
    layers.push(LayerSpec::dense(Dense::zeros(h * w * channels, classes), head));
    Ok(Network::new(layers)?.with_name("vgg19"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(head: Activation, classes: usize) -> Network {
        Network::new(vec![
            LayerSpec::conv(Conv2d::zeros(3, 3, 4, 1, 1), Activation::Relu),
            LayerSpec::max_pool(2, 2),
            LayerSpec::flatten(),
            LayerSpec::dense(Dense::zeros(4 * 4 * 4, classes), head),
        ])
        .unwrap()
    }

    #[test]
    fn zero_weights_give_uniform_softmax() {
        let net = toy(Activation::Softmax, 3).compile(Shape3::new(8, 8, 3)).unwrap();
        let input = Tensor3::from_fn(Shape3::new(8, 8, 3), |i, j, k| (i + j + k) as f32 / 10.0);
        let scores = net.forward(&input).unwrap();
        assert!(scores.probabilities.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-6));
        assert_eq!(scores.labels, vec!["class_0", "class_1", "class_2"]);
    }

    #[test]
    fn sigmoid_head_half_and_burn_index() {
        let net = toy(Activation::Sigmoid, 2).compile(Shape3::new(8, 8, 3)).unwrap();
        let scores = net.forward(&Tensor3::zeros(Shape3::new(8, 8, 3))).unwrap();
        assert_eq!(scores.probabilities, vec![0.5, 0.5]);
        assert_eq!(scores.burn_index, 1);
        assert_eq!(scores.score(WILDFIRE), Some(0.5));
        assert_eq!(scores.p_burn(), 0.5);
    }

    #[test]
    fn compile_rejects_bad_chains() {
        assert!(matches!(toy(Activation::Softmax, 2).compile(Shape3::new(10, 10, 3)), Err(CnnError::Build { index: 3, .. })));
        assert!(matches!(toy(Activation::Relu, 2).compile(Shape3::new(8, 8, 3)), Err(CnnError::NotProbabilistic)));
        let no_flatten = Network::new(vec![LayerSpec::dense(Dense::zeros(3, 2), Activation::Softmax)]).unwrap();
        assert!(matches!(no_flatten.compile(Shape3::new(1, 1, 3)), Err(CnnError::Build { index: 0, .. })));
        let labels = toy(Activation::Softmax, 2).with_labels(vec!["a".into()]);
        assert!(matches!(labels.compile(Shape3::new(8, 8, 3)), Err(CnnError::LabelCount { .. })));
    }

    #[test]
    fn wrong_input_shape_is_rejected() {
        let net = toy(Activation::Softmax, 2).compile(Shape3::new(8, 8, 3)).unwrap();
        assert!(matches!(net.forward(&Tensor3::zeros(Shape3::new(8, 8, 1))), Err(CnnError::InputShape { .. })));
    }

    #[test]
    fn bad_weight_lengths_rejected_at_build() {
        let mut conv = Conv2d::zeros(3, 3, 4, 1, 1);
        conv.bias.pop();
        assert!(matches!(
            Network::new(vec![LayerSpec::conv(conv, Activation::None)]),
            Err(CnnError::Build { index: 0, .. })
        ));
    }

    #[test]
    fn param_counts() {
        assert_eq!(Network::new(vec![]).unwrap().count_params(), ParamCount { total: 0, trainable: 0 });
        let conv = Network::new(vec![LayerSpec::conv(Conv2d::zeros(3, 3, 64, 1, 1), Activation::Relu)]).unwrap();
        assert_eq!(conv.count_params().total, 1792);
        let frozen = Network::new(vec![
            LayerSpec::conv(Conv2d::zeros(3, 3, 64, 1, 1), Activation::Relu).frozen(true),
            LayerSpec::flatten(),
            LayerSpec::dense(Dense::zeros(64, 2), Activation::Softmax),
        ])
        .unwrap();
        assert_eq!(frozen.count_params(), ParamCount { total: 1792 + 130, trainable: 130 });
    }
}
