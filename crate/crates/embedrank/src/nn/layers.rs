//! Layer implementations with cached forward passes and explicit backward
//! passes. Gradients accumulate into per-layer buffers until `zero_grads`.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::Tensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Sigmoid,
    Tanh,
    Identity,
}

impl Activation {
    pub fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
            Activation::Tanh => z.tanh(),
            Activation::Identity => z,
        }
    }

    /// Derivative expressed through the activation's own output value.
    pub fn derivative_from_output(self, y: f64) -> f64 {
        match self {
            Activation::Relu => {
                if y > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Tanh => 1.0 - y * y,
            Activation::Identity => 1.0,
        }
    }
}

/// Uniform Glorot bound: weights ~ U(-limit, +limit).
fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn no_cache() -> Error {
    Error::Invalid("backward called before forward".into())
}

#[derive(Debug, Clone)]
struct Cache {
    input: Tensor,
    output: Tensor,
}

/// 1-D convolution over token positions with ReLU baked in. Weights are
/// filter-major: filter f occupies `w[f*width*in_dim ..]`, laid out
/// position-major to match contiguous input windows.
#[derive(Debug, Clone)]
pub struct Conv1d {
    pub in_dim: usize,
    pub width: usize,
    pub filters: usize,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub gw: Vec<f64>,
    pub gb: Vec<f64>,
    cache: Option<Cache>,
}

impl Conv1d {
    pub fn new(in_dim: usize, width: usize, filters: usize, rng: &mut dyn RngCore) -> Self {
        assert!(in_dim >= 1 && width >= 1 && filters >= 1);
        let wlen = width * in_dim;
        let limit = glorot_limit(wlen, filters);
        let w = (0..filters * wlen).map(|_| rng.random_range(-limit..limit)).collect();
        Self {
            in_dim,
            width,
            filters,
            w,
            b: vec![0.0; filters],
            gw: vec![0.0; filters * wlen],
            gb: vec![0.0; filters],
            cache: None,
        }
    }

    pub fn from_params(in_dim: usize, width: usize, filters: usize, w: Vec<f64>, b: Vec<f64>) -> Self {
        assert_eq!(w.len(), filters * width * in_dim);
        assert_eq!(b.len(), filters);
        let gw = vec![0.0; w.len()];
        let gb = vec![0.0; b.len()];
        Self { in_dim, width, filters, w, b, gw, gb, cache: None }
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        if x.cols() != self.in_dim {
            return Err(Error::Shape(format!(
                "conv input dim {} does not match layer dim {}",
                x.cols(),
                self.in_dim
            )));
        }
        if x.rows() < self.width {
            return Err(Error::Shape(format!(
                "conv input length {} shorter than filter width {}",
                x.rows(),
                self.width
            )));
        }
        let out_rows = x.rows() - self.width + 1;
        let wlen = self.width * self.in_dim;
        let mut out = Tensor::zeros(out_rows, self.filters);
        for i in 0..out_rows {
            let window = x.row_window(i, self.width);
            for f in 0..self.filters {
                let wf = &self.w[f * wlen..(f + 1) * wlen];
                let mut z = self.b[f];
                for (wv, xv) in wf.iter().zip(window) {
                    z += wv * xv;
                }
                out.data_mut()[i * self.filters + f] = z.max(0.0);
            }
        }
        Ok(out)
    }

    fn forward_train(&mut self, x: Tensor) -> Result<Tensor> {
        let out = self.forward(&x)?;
        self.cache = Some(Cache { input: x, output: out.clone() });
        Ok(out)
    }

    fn backward(&mut self, dout: &Tensor, need_input_grad: bool) -> Result<Tensor> {
        let cache = self.cache.as_ref().ok_or_else(no_cache)?;
        let (x, y) = (&cache.input, &cache.output);
        let wlen = self.width * self.in_dim;
        let mut dx = Tensor::zeros(x.rows(), x.cols());
        for i in 0..y.rows() {
            for f in 0..self.filters {
                if y.get(i, f) <= 0.0 {
                    continue;
                }
                let d = dout.get(i, f);
                if d == 0.0 {
                    continue;
                }
                let window = x.row_window(i, self.width);
                let gw = &mut self.gw[f * wlen..(f + 1) * wlen];
                for (g, xv) in gw.iter_mut().zip(window) {
                    *g += d * xv;
                }
                self.gb[f] += d;
                if need_input_grad {
                    let wf = &self.w[f * wlen..(f + 1) * wlen];
                    let lo = i * self.in_dim;
                    let dxs = &mut dx.data_mut()[lo..lo + wlen];
                    for (dv, wv) in dxs.iter_mut().zip(wf) {
                        *dv += d * wv;
                    }
                }
            }
        }
        Ok(dx)
    }
}

/// Max pooling over disjoint position windows; trailing positions that do not
/// fill a window are dropped. Ties route gradient to the first occurrence.
#[derive(Debug, Clone)]
pub struct MaxPool1d {
    pub width: usize,
    cache: Option<PoolCache>,
}

#[derive(Debug, Clone)]
struct PoolCache {
    in_rows: usize,
    cols: usize,
    argmax: Vec<usize>,
}

impl MaxPool1d {
    pub fn new(width: usize) -> Self {
        assert!(width >= 1);
        Self { width, cache: None }
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(self.forward_with_argmax(x)?.0)
    }

    fn forward_with_argmax(&self, x: &Tensor) -> Result<(Tensor, Vec<usize>)> {
        if x.rows() < self.width {
            return Err(Error::Shape(format!(
                "pool input length {} shorter than pool width {}",
                x.rows(),
                self.width
            )));
        }
        let out_rows = x.rows() / self.width;
        let cols = x.cols();
        let mut out = Tensor::zeros(out_rows, cols);
        let mut argmax = vec![0usize; out_rows * cols];
        for w in 0..out_rows {
            let base = w * self.width;
            for c in 0..cols {
                let mut best = x.get(base, c);
                let mut best_row = base;
                for r in base + 1..base + self.width {
                    let v = x.get(r, c);
                    if v > best {
                        best = v;
                        best_row = r;
                    }
                }
                out.data_mut()[w * cols + c] = best;
                argmax[w * cols + c] = best_row;
            }
        }
        Ok((out, argmax))
    }

    fn forward_train(&mut self, x: Tensor) -> Result<Tensor> {
        let (out, argmax) = self.forward_with_argmax(&x)?;
        self.cache = Some(PoolCache { in_rows: x.rows(), cols: x.cols(), argmax });
        Ok(out)
    }

    fn backward(&mut self, dout: &Tensor) -> Result<Tensor> {
        let cache = self.cache.as_ref().ok_or_else(no_cache)?;
        let mut dx = Tensor::zeros(cache.in_rows, cache.cols);
        for w in 0..dout.rows() {
            for c in 0..cache.cols {
                let src = cache.argmax[w * cache.cols + c];
                dx.data_mut()[src * cache.cols + c] += dout.get(w, c);
            }
        }
        Ok(dx)
    }
}

/// Reshapes positions × channels into a single row vector.
#[derive(Debug, Clone, Default)]
pub struct Flatten {
    cache: Option<(usize, usize)>,
}

impl Flatten {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        Ok(Tensor::vector(x.data().to_vec()))
    }

    fn forward_train(&mut self, x: Tensor) -> Result<Tensor> {
        self.cache = Some((x.rows(), x.cols()));
        Ok(Tensor::vector(x.into_data()))
    }

    fn backward(&mut self, dout: Tensor) -> Result<Tensor> {
        let (rows, cols) = self.cache.ok_or_else(no_cache)?;
        Ok(Tensor::matrix(rows, cols, dout.into_data()))
    }
}

/// Fully connected layer on row vectors; weights are output-major
/// (`w[o*in_dim + i]`).
#[derive(Debug, Clone)]
pub struct Dense {
    pub in_dim: usize,
    pub out_dim: usize,
    pub activation: Activation,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
    pub gw: Vec<f64>,
    pub gb: Vec<f64>,
    cache: Option<Cache>,
}

impl Dense {
    pub fn new(in_dim: usize, out_dim: usize, activation: Activation, rng: &mut dyn RngCore) -> Self {
        assert!(in_dim >= 1 && out_dim >= 1);
        let limit = glorot_limit(in_dim, out_dim);
        let w = (0..out_dim * in_dim).map(|_| rng.random_range(-limit..limit)).collect();
        Self {
            in_dim,
            out_dim,
            activation,
            w,
            b: vec![0.0; out_dim],
            gw: vec![0.0; out_dim * in_dim],
            gb: vec![0.0; out_dim],
            cache: None,
        }
    }

    pub fn from_params(
        in_dim: usize,
        out_dim: usize,
        activation: Activation,
        w: Vec<f64>,
        b: Vec<f64>,
    ) -> Self {
        assert_eq!(w.len(), out_dim * in_dim);
        assert_eq!(b.len(), out_dim);
        let gw = vec![0.0; w.len()];
        let gb = vec![0.0; b.len()];
        Self { in_dim, out_dim, activation, w, b, gw, gb, cache: None }
    }

    pub fn forward(&self, x: &Tensor) -> Result<Tensor> {
        if x.rows() != 1 || x.cols() != self.in_dim {
            return Err(Error::Shape(format!(
                "dense expects 1x{} input, got {}x{}",
                self.in_dim,
                x.rows(),
                x.cols()
            )));
        }
        let xv = x.data();
        let mut out = vec![0.0; self.out_dim];
        for o in 0..self.out_dim {
            let wo = &self.w[o * self.in_dim..(o + 1) * self.in_dim];
            let mut z = self.b[o];
            for (wv, x) in wo.iter().zip(xv) {
                z += wv * x;
            }
            out[o] = self.activation.apply(z);
        }
        Ok(Tensor::vector(out))
    }

    fn forward_train(&mut self, x: Tensor) -> Result<Tensor> {
        let out = self.forward(&x)?;
        self.cache = Some(Cache { input: x, output: out.clone() });
        Ok(out)
    }

    fn backward(&mut self, dout: &Tensor, need_input_grad: bool) -> Result<Tensor> {
        let cache = self.cache.as_ref().ok_or_else(no_cache)?;
        let (x, y) = (cache.input.data(), cache.output.data());
        let mut dx = vec![0.0; self.in_dim];
        for o in 0..self.out_dim {
            let dz = dout.data()[o] * self.activation.derivative_from_output(y[o]);
            if dz == 0.0 {
                continue;
            }
            let base = o * self.in_dim;
            for i in 0..self.in_dim {
                self.gw[base + i] += dz * x[i];
            }
            self.gb[o] += dz;
            if need_input_grad {
                for i in 0..self.in_dim {
                    dx[i] += dz * self.w[base + i];
                }
            }
        }
        Ok(Tensor::vector(dx))
    }
}

/// Inverted dropout: in training, elements are zeroed with probability `rate`
/// and survivors scaled by 1/(1-rate); inference is the identity. A rate of 0
/// draws nothing from the RNG.
#[derive(Debug, Clone)]
pub struct Dropout {
    pub rate: f64,
    mask: Option<Vec<f64>>,
}

impl Dropout {
    pub fn new(rate: f64) -> Self {
        assert!((0.0..1.0).contains(&rate), "dropout rate must be in [0, 1)");
        Self { rate, mask: None }
    }

    fn forward_train(&mut self, x: Tensor, rng: &mut dyn RngCore) -> Tensor {
        if self.rate == 0.0 {
            self.mask = None;
            return x;
        }
        let scale = 1.0 / (1.0 - self.rate);
        let mask: Vec<f64> = x
            .data()
            .iter()
            .map(|_| if rng.random::<f64>() < self.rate { 0.0 } else { scale })
            .collect();
        let mut out = x;
        for (v, m) in out.data_mut().iter_mut().zip(&mask) {
            *v *= m;
        }
        self.mask = Some(mask);
        out
    }

    fn backward(&mut self, dout: Tensor) -> Tensor {
        match &self.mask {
            None => dout,
            Some(mask) => {
                let mut dx = dout;
                for (v, m) in dx.data_mut().iter_mut().zip(mask) {
                    *v *= m;
                }
                dx
            }
        }
    }
}

#[derive(Debug, Clone)]
pub enum Layer {
    Conv1d(Conv1d),
    MaxPool1d(MaxPool1d),
    Flatten(Flatten),
    Dense(Dense),
    Dropout(Dropout),
}

impl Layer {
    pub fn forward_infer(&self, x: &Tensor) -> Result<Tensor> {
        match self {
            Layer::Conv1d(l) => l.forward(x),
            Layer::MaxPool1d(l) => l.forward(x),
            Layer::Flatten(l) => l.forward(x),
            Layer::Dense(l) => l.forward(x),
            Layer::Dropout(_) => Ok(x.clone()),
        }
    }

    pub fn forward_train(&mut self, x: Tensor, rng: &mut dyn RngCore) -> Result<Tensor> {
        match self {
            Layer::Conv1d(l) => l.forward_train(x),
            Layer::MaxPool1d(l) => l.forward_train(x),
            Layer::Flatten(l) => l.forward_train(x),
            Layer::Dense(l) => l.forward_train(x),
            Layer::Dropout(l) => Ok(l.forward_train(x, rng)),
        }
    }

    pub fn backward(&mut self, dout: Tensor, need_input_grad: bool) -> Result<Tensor> {
        match self {
            Layer::Conv1d(l) => l.backward(&dout, need_input_grad),
            Layer::MaxPool1d(l) => l.backward(&dout),
            Layer::Flatten(l) => l.backward(dout),
            Layer::Dense(l) => l.backward(&dout, need_input_grad),
            Layer::Dropout(l) => Ok(l.backward(dout)),
        }
    }

    pub fn zero_grads(&mut self) {
        match self {
            Layer::Conv1d(l) => {
                l.gw.fill(0.0);
                l.gb.fill(0.0);
            }
            Layer::Dense(l) => {
                l.gw.fill(0.0);
                l.gb.fill(0.0);
            }
            _ => {}
        }
    }

    pub fn param_blocks(&self) -> Vec<&[f64]> {
        match self {
            Layer::Conv1d(l) => vec![&l.w, &l.b],
            Layer::Dense(l) => vec![&l.w, &l.b],
            _ => vec![],
        }
    }

    pub fn param_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        match self {
            Layer::Conv1d(Conv1d { w, b, .. }) => vec![w.as_mut_slice(), b.as_mut_slice()],
            Layer::Dense(Dense { w, b, .. }) => vec![w.as_mut_slice(), b.as_mut_slice()],
            _ => vec![],
        }
    }

    pub fn grad_blocks(&self) -> Vec<&[f64]> {
        match self {
            Layer::Conv1d(l) => vec![&l.gw, &l.gb],
            Layer::Dense(l) => vec![&l.gw, &l.gb],
            _ => vec![],
        }
    }

    /// `p -= step * g` for every parameter.
    pub fn apply_gradients(&mut self, step: f64) {
        match self {
            Layer::Conv1d(Conv1d { w, b, gw, gb, .. })
            | Layer::Dense(Dense { w, b, gw, gb, .. }) => {
                for (p, g) in w.iter_mut().zip(gw.iter()) {
                    *p -= step * g;
                }
                for (p, g) in b.iter_mut().zip(gb.iter()) {
                    *p -= step * g;
                }
            }
            _ => {}
        }
    }
}

/// An ordered stack of layers trained by explicit backpropagation.
#[derive(Debug, Clone)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Self {
        Self { layers }
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn infer(&self, x: &Tensor) -> Result<Tensor> {
        self.infer_prefix(x, self.layers.len())
    }

    /// Runs inference through the first `upto` layers only.
    pub fn infer_prefix(&self, x: &Tensor, upto: usize) -> Result<Tensor> {
        let mut cur = x.clone();
        for layer in &self.layers[..upto] {
            cur = layer.forward_infer(&cur)?;
        }
        Ok(cur)
    }

    pub fn forward_train(&mut self, x: &Tensor, rng: &mut dyn RngCore) -> Result<Tensor> {
        let mut cur = x.clone();
        for layer in &mut self.layers {
            cur = layer.forward_train(cur, rng)?;
        }
        Ok(cur)
    }

    /// Accumulates parameter gradients from the loss gradient at the output.
    /// The input gradient of the first layer is not computed (inputs are
    /// frozen word vectors or histograms, never trained).
    pub fn backward(&mut self, dout: Tensor) -> Result<()> {
        let mut d = dout;
        for (i, layer) in self.layers.iter_mut().enumerate().rev() {
            d = layer.backward(d, i > 0)?;
        }
        Ok(())
    }

    pub fn zero_grads(&mut self) {
        for layer in &mut self.layers {
            layer.zero_grads();
        }
    }

    pub fn apply_gradients(&mut self, step: f64) {
        for layer in &mut self.layers {
            layer.apply_gradients(step);
        }
    }

    pub fn param_blocks(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(Layer::param_blocks).collect()
    }

    pub fn param_blocks_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(Layer::param_blocks_mut).collect()
    }

    pub fn grad_blocks(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(Layer::grad_blocks).collect()
    }

    pub fn param_count(&self) -> usize {
        self.param_blocks().iter().map(|b| b.len()).sum()
    }

    pub fn params_flat(&self) -> Vec<f64> {
        self.param_blocks().concat()
    }

    pub fn grads_flat(&self) -> Vec<f64> {
        self.grad_blocks().concat()
    }

    pub fn param_get(&self, idx: usize) -> f64 {
        let mut i = idx;
        for block in self.param_blocks() {
            if i < block.len() {
                return block[i];
            }
            i -= block.len();
        }
        panic!("parameter index {idx} out of range");
    }

    pub fn param_set(&mut self, idx: usize, value: f64) {
        let mut i = idx;
        for block in self.param_blocks_mut() {
            if i < block.len() {
                block[i] = value;
                return;
            }
            i -= block.len();
        }
        panic!("parameter index {idx} out of range");
    }

    /// Restores parameters from checkpoint blocks; lengths must match the
    /// current architecture exactly.
    pub fn set_param_blocks(&mut self, blocks: &[Vec<f64>]) -> Result<()> {
        let mut own = self.param_blocks_mut();
        if own.len() != blocks.len() {
            return Err(Error::Shape(format!(
                "checkpoint has {} parameter blocks, model has {}",
                blocks.len(),
                own.len()
            )));
        }
        for (dst, src) in own.iter_mut().zip(blocks) {
            if dst.len() != src.len() {
                return Err(Error::Shape(format!(
                    "checkpoint block of {} values does not fit model block of {}",
                    src.len(),
                    dst.len()
                )));
            }
            dst.copy_from_slice(src);
        }
        Ok(())
    }

    /// Central finite differences of `loss_fn` with respect to every
    /// parameter; parameters are restored bit-exactly afterwards.
    pub fn fd_gradient(
        &mut self,
        loss_fn: &mut dyn FnMut(&mut Network) -> Result<f64>,
    ) -> Result<Vec<f64>> {
        let n = self.param_count();
        let mut grads = vec![0.0; n];
        for i in 0..n {
            let orig = self.param_get(i);
            self.param_set(i, orig + super::FD_STEP);
            let up = loss_fn(self)?;
            self.param_set(i, orig - super::FD_STEP);
            let down = loss_fn(self)?;
            self.param_set(i, orig);
            grads[i] = (up - down) / (2.0 * super::FD_STEP);
        }
        Ok(grads)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn conv_hand_example() {
        let conv = Conv1d::from_params(1, 2, 1, vec![1.0, 1.0], vec![0.0]);
        let x = Tensor::matrix(3, 1, vec![1.0, 2.0, 3.0]);
        let y = conv.forward(&x).unwrap();
        assert_eq!(y.data(), &[3.0, 5.0]);
    }

    #[test]
    fn conv_relu_clamps_negative_preactivations() {
        let conv = Conv1d::from_params(1, 2, 1, vec![0.0, 0.0], vec![-1.0]);
        let x = Tensor::matrix(4, 1, vec![1.0, 2.0, 3.0, 4.0]);
        let y = conv.forward(&x).unwrap();
        assert!(y.data().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn conv_rejects_input_shorter_than_filter() {
        let conv = Conv1d::from_params(1, 3, 1, vec![1.0; 3], vec![0.0]);
        let x = Tensor::matrix(2, 1, vec![1.0, 2.0]);
        assert!(conv.forward(&x).is_err());
    }

    #[test]
    fn conv_matches_naive_oracle() {
        let mut r = rng(7);
        let (in_dim, width, filters, n) = (3, 2, 4, 6);
        let conv = Conv1d::new(in_dim, width, filters, &mut r);
        let x_data: Vec<f64> = (0..n * in_dim).map(|_| r.random_range(-1.0..1.0)).collect();
        let x = Tensor::matrix(n, in_dim, x_data.clone());
        let y = conv.forward(&x).unwrap();
        // Independent recomputation with explicit index arithmetic.
        for i in 0..n - width + 1 {
            for f in 0..filters {
                let mut z = conv.b[f];
                for t in 0..width {
                    for j in 0..in_dim {
                        z += conv.w[f * width * in_dim + t * in_dim + j]
                            * x_data[(i + t) * in_dim + j];
                    }
                }
                let expect = if z > 0.0 { z } else { 0.0 };
                assert!((y.get(i, f) - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn maxpool_examples() {
        let pool = MaxPool1d::new(2);
        let y = pool.forward(&Tensor::matrix(2, 1, vec![3.0, 5.0])).unwrap();
        assert_eq!(y.data(), &[5.0]);
        let y = pool.forward(&Tensor::matrix(5, 1, vec![1.0, 4.0, 2.0, 2.0, 9.0])).unwrap();
        assert_eq!(y.data(), &[4.0, 2.0], "trailing partial window must be dropped");
        let y = pool.forward(&Tensor::matrix(4, 1, vec![7.0; 4])).unwrap();
        assert_eq!(y.data(), &[7.0, 7.0]);
    }

    #[test]
    fn maxpool_rejects_short_input() {
        let pool = MaxPool1d::new(3);
        assert!(pool.forward(&Tensor::matrix(2, 1, vec![1.0, 2.0])).is_err());
    }

    #[test]
    fn maxpool_ties_route_gradient_to_first_occurrence() {
        let mut pool = MaxPool1d::new(3);
        let x = Tensor::matrix(3, 1, vec![2.0, 5.0, 5.0]);
        pool.forward_train(x).unwrap();
        let dx = pool.backward(&Tensor::vector(vec![1.0])).unwrap();
        assert_eq!(dx.data(), &[0.0, 1.0, 0.0]);
    }

    #[test]
    fn dense_forward_hand_example() {
        let dense =
            Dense::from_params(2, 2, Activation::Identity, vec![1.0, 2.0, 0.0, -1.0], vec![0.5, 0.0]);
        let y = dense.forward(&Tensor::vector(vec![3.0, 4.0])).unwrap();
        assert_eq!(y.data(), &[3.0 + 8.0 + 0.5, -4.0]);
    }

    #[test]
    fn dense_activation_ranges() {
        let mut r = rng(3);
        let sig = Dense::new(4, 3, Activation::Sigmoid, &mut r);
        let relu = Dense::new(4, 3, Activation::Relu, &mut r);
        let x = Tensor::vector(vec![5.0, -9.0, 2.0, 0.1]);
        for v in sig.forward(&x).unwrap().data() {
            assert!(*v > 0.0 && *v < 1.0);
        }
        for v in relu.forward(&x).unwrap().data() {
            assert!(*v >= 0.0);
        }
    }

    #[test]
    fn dropout_is_identity_at_inference() {
        let layer = Layer::Dropout(Dropout::new(0.5));
        let x = Tensor::vector(vec![1.0, 2.0, 3.0]);
        assert_eq!(layer.forward_infer(&x).unwrap(), x);
    }

    #[test]
    fn dropout_zero_rate_skips_rng() {
        let mut d = Dropout::new(0.0);
        let mut r1 = rng(11);
        let before = r1.clone();
        let x = Tensor::vector(vec![1.0, 2.0]);
        let y = d.forward_train(x.clone(), &mut r1);
        assert_eq!(y, x);
        // The RNG stream must be untouched.
        assert_eq!(r1.random::<u64>(), before.clone().random::<u64>());
    }

    #[test]
    fn dropout_masks_are_zero_or_inverted_scale() {
        let mut d = Dropout::new(0.5);
        let mut r = rng(1);
        let x = Tensor::vector(vec![1.0; 64]);
        let y = d.forward_train(x, &mut r);
        let mut kept = 0;
        for v in y.data() {
            assert!(*v == 0.0 || (*v - 2.0).abs() < 1e-15);
            if *v != 0.0 {
                kept += 1;
            }
        }
        assert!(kept > 0 && kept < 64);
    }

    #[test]
    fn dropout_deterministic_per_seed() {
        let x = Tensor::vector(vec![1.0; 32]);
        let mut d1 = Dropout::new(0.5);
        let mut d2 = Dropout::new(0.5);
        let y1 = d1.forward_train(x.clone(), &mut rng(5));
        let y2 = d2.forward_train(x, &mut rng(5));
        assert_eq!(y1, y2);
    }

    #[test]
    fn backward_before_forward_is_an_error() {
        let mut layer = Layer::Conv1d(Conv1d::from_params(1, 2, 1, vec![1.0, 1.0], vec![0.0]));
        assert!(layer.backward(Tensor::vector(vec![1.0]), false).is_err());
    }

    #[test]
    fn doubling_output_gradient_doubles_parameter_gradients() {
        let mut r = rng(9);
        let mut net = Network::new(vec![
            Layer::Dense(Dense::new(3, 4, Activation::Tanh, &mut r)),
            Layer::Dense(Dense::new(4, 2, Activation::Sigmoid, &mut r)),
        ]);
        let x = Tensor::vector(vec![0.3, -0.2, 0.9]);
        let dout = vec![0.7, -0.4];

        net.zero_grads();
        net.forward_train(&x, &mut r).unwrap();
        net.backward(Tensor::vector(dout.clone())).unwrap();
        let g1 = net.grads_flat();

        net.zero_grads();
        net.forward_train(&x, &mut r).unwrap();
        net.backward(Tensor::vector(dout.iter().map(|d| 2.0 * d).collect())).unwrap();
        let g2 = net.grads_flat();

        for (a, b) in g1.iter().zip(&g2) {
            assert!((2.0 * a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn dead_relu_region_yields_zero_gradients() {
        // W=0, b=-1 kills every conv unit; nothing upstream should move.
        let mut net = Network::new(vec![
            Layer::Conv1d(Conv1d::from_params(1, 2, 2, vec![0.0; 4], vec![-1.0, -1.0])),
            Layer::Flatten(Flatten::new()),
            Layer::Dense(Dense::from_params(6, 1, Activation::Identity, vec![1.0; 6], vec![0.0])),
        ]);
        let x = Tensor::matrix(4, 1, vec![1.0, 2.0, 3.0, 4.0]);
        net.zero_grads();
        let mut r = rng(0);
        net.forward_train(&x, &mut r).unwrap();
        net.backward(Tensor::vector(vec![1.0])).unwrap();
        let conv_grads = &net.grad_blocks()[0..2];
        assert!(conv_grads.iter().all(|b| b.iter().all(|&g| g == 0.0)));
    }

    #[test]
    fn param_flat_indexing_round_trips() {
        let mut r = rng(2);
        let mut net = Network::new(vec![
            Layer::Conv1d(Conv1d::new(2, 2, 3, &mut r)),
            Layer::Flatten(Flatten::new()),
            Layer::Dense(Dense::new(9, 2, Activation::Identity, &mut r)),
        ]);
        let n = net.param_count();
        assert_eq!(n, 3 * 4 + 3 + 2 * 9 + 2);
        let before = net.params_flat();
        for i in 0..n {
            assert_eq!(net.param_get(i), before[i]);
        }
        net.param_set(n - 1, 42.0);
        assert_eq!(net.param_get(n - 1), 42.0);
    }
}
