//! Adaptive-moment optimizer over the encoder and head tensors.

use super::{Heads, TrainConfig};
use crate::encoder::EncoderState;

pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: u64,
    // first/second moments: encoder tensors in visit order, then head tensors
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    trainable: Vec<bool>,
}

impl Adam {
    pub fn new(encoder: &EncoderState, heads: &Heads, cfg: &TrainConfig) -> Self {
        let mut m = Vec::new();
        let mut trainable = Vec::new();
        encoder.for_each_tensor(|name, t| {
            m.push(vec![0.0; t.len()]);
            trainable.push(encoder.tensor_is_trainable(name));
        });
        heads.for_each_tensor(|_, t| {
            m.push(vec![0.0; t.len()]);
            trainable.push(true);
        });
        Self {
            lr: cfg.lr,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.adam_eps,
            step: 0,
            v: m.clone(),
            m,
            trainable,
        }
    }

    /// Apply one update from already-averaged gradients. Bumps the encoder's
    /// parameter version so stale traces are detected.
    pub fn step(
        &mut self,
        encoder: &mut EncoderState,
        heads: &mut Heads,
        enc_grads: &EncoderState,
        head_grads: &Heads,
    ) {
        self.step += 1;
        let bc1 = 1.0 - self.beta1.powi(self.step as i32);
        let bc2 = 1.0 - self.beta2.powi(self.step as i32);
        let mut grads: Vec<&[f64]> = Vec::with_capacity(self.m.len());
        enc_grads.for_each_tensor(|_, t| grads.push(t));
        head_grads.for_each_tensor(|_, t| grads.push(t));

        let mut idx = 0;
        let (lr, b1, b2, eps) = (self.lr, self.beta1, self.beta2, self.eps);
        let (ms, vs, trainable) = (&mut self.m, &mut self.v, &self.trainable);
        let mut apply = |_: &str, tensor: &mut Vec<f64>| {
            let g = grads[idx];
            if trainable[idx] {
                let m = &mut ms[idx];
                let v = &mut vs[idx];
                for i in 0..tensor.len() {
                    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
                    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
                    let mhat = m[i] / bc1;
                    let vhat = v[i] / bc2;
                    tensor[i] -= lr * mhat / (vhat.sqrt() + eps);
                }
            }
            idx += 1;
        };
        encoder.for_each_tensor_mut(&mut apply);
        heads.for_each_tensor_mut(&mut apply);
        encoder.version += 1;
    }
}
