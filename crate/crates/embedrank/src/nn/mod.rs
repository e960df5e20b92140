//! Neural-network kernel: row-major tensors, layers with explicit forward and
//! backward passes, binary cross-entropy, plain SGD, a central-difference
//! gradient checker, and a versioned binary checkpoint format.

mod checkpoint;
mod gradcheck;
mod layers;
mod loss;
mod optim;

pub use checkpoint::{read_checkpoint, write_checkpoint, CHECKPOINT_MAGIC, CHECKPOINT_VERSION};
pub use gradcheck::{
    check_cnn_stack, cnn_suite, max_rel_err, relative_error, BlockCheck, FD_STEP, GRADCHECK_TOL,
};
pub use layers::{Activation, Conv1d, Dense, Dropout, Flatten, Layer, MaxPool1d, Network};
pub use loss::{bce_grad, bce_loss, BCE_EPS};
pub use optim::Sgd;

use crate::error::{Error, Result};

/// Row-major 2-D tensor. Sequence data is position-major: row i holds the
/// channels of position i, so consecutive positions are contiguous in memory.
/// Vectors are single-row tensors.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Tensor {
    pub fn matrix(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols, "tensor data length mismatch");
        Self { rows, cols, data }
    }

    pub fn vector(data: Vec<f64>) -> Self {
        let cols = data.len();
        Self { rows: 1, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> [usize; 2] {
        [self.rows, self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Rows `r .. r + height` as one contiguous slice.
    pub fn row_window(&self, r: usize, height: usize) -> &[f64] {
        &self.data[r * self.cols..(r + height) * self.cols]
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Invalid("tensor contains NaN or infinite values".into()))
        }
    }
}

impl From<&crate::text::EmbeddingMatrix> for Tensor {
    fn from(m: &crate::text::EmbeddingMatrix) -> Self {
        Tensor::matrix(m.len(), m.dim(), m.data().to_vec())
    }
}
