//! Binary cross-entropy over independent sigmoid outputs.

use crate::error::{Error, Result};

/// Probabilities are clamped to [EPS, 1-EPS] before taking logs.
pub const BCE_EPS: f64 = 1e-12;

fn check_shapes(p: &[f64], q: &[f64]) -> Result<()> {
    if p.len() != q.len() {
        return Err(Error::Shape(format!(
            "probability vector of length {} vs target of length {}",
            p.len(),
            q.len()
        )));
    }
    Ok(())
}

/// -Σ_i [q_i ln p_i + (1-q_i) ln(1-p_i)] with clamped probabilities.
pub fn bce_loss(p: &[f64], q: &[f64]) -> Result<f64> {
    check_shapes(p, q)?;
    let mut loss = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let pc = pi.clamp(BCE_EPS, 1.0 - BCE_EPS);
        loss -= qi * pc.ln() + (1.0 - qi) * (1.0 - pc).ln();
    }
    Ok(loss)
}

/// dL/dp_i. Zero where the clamp is active (the loss is flat in p there).
pub fn bce_grad(p: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    check_shapes(p, q)?;
    Ok(p.iter()
        .zip(q)
        .map(|(&pi, &qi)| {
            if pi <= BCE_EPS || pi >= 1.0 - BCE_EPS {
                0.0
            } else {
                -qi / pi + (1.0 - qi) / (1.0 - pi)
            }
        })
        .collect())
}
