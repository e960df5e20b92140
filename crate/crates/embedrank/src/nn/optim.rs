//! Plain stochastic gradient descent with per-instance sample weights.

use super::Network;

#[derive(Debug, Clone, Copy)]
pub struct Sgd {
    pub learning_rate: f64,
}

impl Sgd {
    pub const DEFAULT_LEARNING_RATE: f64 = 0.01;

    pub fn new(learning_rate: f64) -> Self {
        assert!(learning_rate > 0.0);
        Self { learning_rate }
    }

    /// `p -= lr * sample_weight * g` over every parameter of the network.
    pub fn step(&self, net: &mut Network, sample_weight: f64) {
        net.apply_gradients(self.learning_rate * sample_weight);
    }

    /// Slice form for parameters living outside a `Network` (the gating
    /// scalar, for instance).
    pub fn step_slice(&self, params: &mut [f64], grads: &[f64], sample_weight: f64) {
        assert_eq!(params.len(), grads.len());
        for (p, g) in params.iter_mut().zip(grads) {
            *p -= self.learning_rate * sample_weight * g;
        }
    }
}

impl Default for Sgd {
    fn default() -> Self {
        Self { learning_rate: Self::DEFAULT_LEARNING_RATE }
    }
}
