//! Training losses, numerically stabilized, with closed-form gradients.

use crate::error::{Error, Result};

/// Binary cross-entropy over two logits: `-log softmax(logits)[y]`.
pub fn loss_cls(logits: &[f64; 2], y: usize) -> f64 {
    loss_cls_grad(logits, y).0
}

/// Loss and gradient w.r.t. the logits (`softmax - onehot`).
pub fn loss_cls_grad(logits: &[f64; 2], y: usize) -> (f64, [f64; 2]) {
    let m = logits[0].max(logits[1]);
    let e0 = (logits[0] - m).exp();
    let e1 = (logits[1] - m).exp();
    let z = e0 + e1;
    let loss = z.ln() - (logits[y] - m);
    let mut grad = [e0 / z, e1 / z];
    grad[y] -= 1.0;
    (loss, grad)
}

/// Mean over the five artifact dimensions of the stabilized sigmoid BCE.
pub fn loss_ind(logits: &[f64; 5], target: &[bool; 5]) -> f64 {
    loss_ind_grad(logits, target).0
}

/// Loss and gradient w.r.t. the logits (`(sigmoid - target) / 5`).
pub fn loss_ind_grad(logits: &[f64; 5], target: &[bool; 5]) -> (f64, [f64; 5]) {
    let mut loss = 0.0;
    let mut grad = [0.0; 5];
    for i in 0..5 {
        let z = logits[i];
        let y = if target[i] { 1.0 } else { 0.0 };
        // max(z,0) - z*y + ln(1 + exp(-|z|))
        loss += z.max(0.0) - z * y + (-z.abs()).exp().ln_1p();
        let sigma = 1.0 / (1.0 + (-z).exp());
        grad[i] = (sigma - y) / 5.0;
    }
    (loss / 5.0, grad)
}

/// Squared Euclidean distance between current and teacher features.
pub fn loss_dis(current: &[f64], previous: &[f64]) -> Result<f64> {
    if current.len() != previous.len() {
        return Err(Error::InvalidInput(
            "feature dimensions differ between student and teacher".into(),
        ));
    }
    Ok(current
        .iter()
        .zip(previous)
        .map(|(a, b)| (a - b) * (a - b))
        .sum())
}

/// `l_cls + mu1 * l_ind + mu2 * l_dis`
pub fn loss_total(l_cls: f64, l_ind: f64, l_dis: f64, mu1: f64, mu2: f64) -> f64 {
    l_cls + mu1 * l_ind + mu2 * l_dis
}
