//! Central finite-difference validation of analytic gradients.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{bce_grad, bce_loss, Activation, Conv1d, Dense, Dropout, Flatten, Layer, MaxPool1d, Network, Tensor};
use crate::error::Result;

/// Central-difference step.
pub const FD_STEP: f64 = 1e-5;
/// Maximum tolerated relative error between analytic and numeric gradients.
pub const GRADCHECK_TOL: f64 = 1e-4;

/// Relative error with a dead zone: when both gradients are essentially zero
/// (dead ReLU units, hinge flat regions) the comparison is vacuous.
pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    let denom = analytic.abs().max(numeric.abs());
    if denom < 1e-7 {
        0.0
    } else {
        (analytic - numeric).abs() / denom
    }
}

pub fn max_rel_err(analytic: &[f64], numeric: &[f64]) -> f64 {
    assert_eq!(analytic.len(), numeric.len());
    analytic
        .iter()
        .zip(numeric)
        .map(|(&a, &n)| relative_error(a, n))
        .fold(0.0, f64::max)
}

/// One named parameter block's check result.
#[derive(Debug, Clone)]
pub struct BlockCheck {
    pub name: &'static str,
    pub params: usize,
    pub max_rel_err: f64,
}

impl BlockCheck {
    pub fn passed(&self) -> bool {
        self.max_rel_err < GRADCHECK_TOL
    }
}

const STACK_BLOCK_NAMES: [&str; 6] = [
    "conv1d.weights",
    "conv1d.bias",
    "dense_relu.weights",
    "dense_relu.bias",
    "dense_sigmoid.weights",
    "dense_sigmoid.bias",
];

/// Checks the full classifier stack (conv -> maxpool -> flatten -> dense ReLU
/// -> dropout-off -> dense sigmoid) against binary cross-entropy. Parameters
/// are drawn U(-0.5, 0.5); the inactive dropout keeps the loss deterministic
/// so finite differences are well defined.
pub fn check_cnn_stack(seed: u64) -> Result<Vec<BlockCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (in_dim, length, filters, width, pool, hidden, labels) = (4, 9, 3, 3, 2, 5, 4);
    let mut net = Network::new(vec![
        Layer::Conv1d(Conv1d::new(in_dim, width, filters, &mut rng)),
        Layer::MaxPool1d(MaxPool1d::new(pool)),
        Layer::Flatten(Flatten::new()),
        // conv keeps 7 positions, pooling 3; flatten feeds 3*filters values.
        Layer::Dense(Dense::new(3 * filters, hidden, Activation::Relu, &mut rng)),
        Layer::Dropout(Dropout::new(0.0)),
        Layer::Dense(Dense::new(hidden, labels, Activation::Sigmoid, &mut rng)),
    ]);
    for block in net.param_blocks_mut() {
        for p in block {
            *p = rng.random_range(-0.5..0.5);
        }
    }
    let x = Tensor::matrix(
        length,
        in_dim,
        (0..length * in_dim).map(|_| rng.random_range(-1.0..1.0)).collect(),
    );
    let q: Vec<f64> =
        (0..labels).map(|_| if rng.random::<f64>() < 0.5 { 1.0 } else { 0.0 }).collect();

    net.zero_grads();
    let p = net.forward_train(&x, &mut rng)?;
    let dl = bce_grad(p.data(), &q)?;
    net.backward(Tensor::vector(dl))?;
    let analytic = net.grads_flat();

    let numeric = net.fd_gradient(&mut |n: &mut Network| {
        let p = n.infer(&x)?;
        bce_loss(p.data(), &q)
    })?;

    let mut checks = Vec::new();
    let mut offset = 0;
    let sizes: Vec<usize> = net.param_blocks().iter().map(|b| b.len()).collect();
    for (name, size) in STACK_BLOCK_NAMES.iter().zip(sizes) {
        let err = max_rel_err(&analytic[offset..offset + size], &numeric[offset..offset + size]);
        checks.push(BlockCheck { name, params: size, max_rel_err: err });
        offset += size;
    }
    Ok(checks)
}

/// Runs [`check_cnn_stack`] for `seeds` seeds and keeps the worst error per
/// block.
pub fn cnn_suite(seeds: u64) -> Result<Vec<BlockCheck>> {
    let mut worst: Vec<BlockCheck> = Vec::new();
    for seed in 0..seeds {
        let checks = check_cnn_stack(seed)?;
        if worst.is_empty() {
            worst = checks;
        } else {
            for (w, c) in worst.iter_mut().zip(checks) {
                if c.max_rel_err > w.max_rel_err {
                    w.max_rel_err = c.max_rel_err;
                }
            }
        }
    }
    Ok(worst)
}
