use serde::{Deserialize, Serialize};

/// Element-wise nonlinearity applied after a layer's affine part.
///
/// `Softmax` normalizes across the channel axis (per pixel for feature maps,
/// across the whole vector for dense outputs).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub enum Activation {
    #[default]
    None,
    Relu,
    LeakyRelu(f32),
    Tanh,
    Sigmoid,
    Softmax,
}

impl Activation {
    /// Tag used by the CNNW weight format.
    pub fn tag(&self) -> u8 {
        match self {
            Self::None => 0,
            Self::Relu => 1,
            Self::LeakyRelu(_) => 2,
            Self::Tanh => 3,
            Self::Sigmoid => 4,
            Self::Softmax => 5,
        }
    }

    /// Applies the activation to one channel vector in place.
    pub fn apply(&self, values: &mut [f32]) {
        match *self {
            Self::None => {}
            Self::Relu => values.iter_mut().for_each(|v| *v = relu(*v)),
            Self::LeakyRelu(alpha) => values.iter_mut().for_each(|v| *v = leaky_relu(*v, alpha)),
            Self::Tanh => values.iter_mut().for_each(|v| *v = v.tanh()),
            Self::Sigmoid => values.iter_mut().for_each(|v| *v = sigmoid(*v)),
            Self::Softmax => softmax_in_place(values),
        }
    }
}

pub fn relu(x: f32) -> f32 {
    x.max(0.0)
}

pub fn leaky_relu(x: f32, alpha: f32) -> f32 {
    if x >= 0.0 {
        x
    } else {
        alpha * x
    }
}

pub fn tanh(x: f32) -> f32 {
    x.tanh()
}

pub fn sigmoid(x: f32) -> f32 {
    let x = f64::from(x);
    let y = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    y as f32
}

pub fn softmax(logits: &[f32]) -> Vec<f32> {
    let mut out = logits.to_vec();
    softmax_in_place(&mut out);
    out
}

fn softmax_in_place(values: &mut [f32]) {
    if values.is_empty() {
        return;
    }
    let max = values.iter().copied().fold(f32::NEG_INFINITY, f32::max);
    let exps: Vec<f64> = values.iter().map(|&v| f64::from(v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    for (v, e) in values.iter_mut().zip(exps) {
        *v = (e / total) as f32;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_midpoint_and_range() {
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(sigmoid(-50.0) > 0.0 && sigmoid(-50.0) < 1e-20);
        assert!(sigmoid(10.0) < 1.0);
    }

    #[test]
    fn softmax_uniform_and_stable() {
        let u = softmax(&[3.0; 4]);
        assert!(u.iter().all(|&p| (p - 0.25).abs() < 1e-7));
        let s = softmax(&[1000.0, 0.0]);
        assert!((s[0] - 1.0).abs() < 1e-7 && s[1] >= 0.0 && s[1] < 1e-7);
        assert!(s.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn relu_family() {
        assert_eq!(relu(-2.0), 0.0);
        assert_eq!(relu(2.0), 2.0);
        assert_eq!(leaky_relu(-2.0, 0.1), -0.2);
        assert_eq!(leaky_relu(3.0, 0.1), 3.0);
        assert!((tanh(0.5) - 0.5f32.tanh()).abs() < f32::EPSILON);
    }
}
