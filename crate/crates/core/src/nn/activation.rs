use serde::{Deserialize, Serialize};

/// Element-wise nonlinearities used by the layers.
///
/// `HardSigmoid` is the piecewise-linear gate activation
/// `clamp(0.2 z + 0.5, 0, 1)`; `HardTanh` is `clamp(z, -1, 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
    HardSigmoid,
    HardTanh,
    Identity,
}

impl Activation {
    #[inline]
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    z
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => sigmoid(z),
            Activation::Tanh => z.tanh(),
            Activation::HardSigmoid => (0.2 * z + 0.5).clamp(0.0, 1.0),
            Activation::HardTanh => z.clamp(-1.0, 1.0),
            Activation::Identity => z,
        }
    }

    /// Derivative with respect to the pre-activation `z`.
    ///
    /// At the kinks of the piecewise-linear activations the left derivative
    /// is used; the training data never sits exactly on a kink.
    #[inline]
    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
            Activation::Tanh => {
                let t = z.tanh();
                1.0 - t * t
            }
            Activation::HardSigmoid => {
                if z > -2.5 && z < 2.5 {
                    0.2
                } else {
                    0.0
                }
            }
            Activation::HardTanh => {
                if z > -1.0 && z < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

#[inline]
pub fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}
