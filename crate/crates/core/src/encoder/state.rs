use super::config::{EncoderConfig, GateMode};
use crate::error::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// One pre-norm transformer layer: self-attention then MLP.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerParams {
    pub ln1_g: Vec<f64>,
    pub ln1_b: Vec<f64>,
    pub wq: Vec<f64>,
    pub bq: Vec<f64>,
    pub wk: Vec<f64>,
    pub bk: Vec<f64>,
    pub wv: Vec<f64>,
    pub bv: Vec<f64>,
    pub wo: Vec<f64>,
    pub bo: Vec<f64>,
    pub ln2_g: Vec<f64>,
    pub ln2_b: Vec<f64>,
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

/// Cross-attention + gate for one injected layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ApaParams {
    pub wq: Vec<f64>,
    pub bq: Vec<f64>,
    pub wk: Vec<f64>,
    pub bk: Vec<f64>,
    pub wv: Vec<f64>,
    pub bv: Vec<f64>,
    pub wo: Vec<f64>,
    pub bo: Vec<f64>,
    pub gate: Vec<f64>,
}

/// All encoder parameters. Also serves as the gradient container: gradients
/// share the exact tensor layout.
#[derive(Debug, Clone, PartialEq)]
pub struct EncoderState {
    pub cfg: EncoderConfig,
    pub patch_w: Vec<f64>,
    pub patch_b: Vec<f64>,
    pub cls: Vec<f64>,
    pub pos: Vec<f64>,
    pub layers: Vec<LayerParams>,
    pub apa: Vec<ApaParams>,
    pub lnf_g: Vec<f64>,
    pub lnf_b: Vec<f64>,
    /// Bumped on every parameter update; traces remember the version they
    /// were produced against.
    pub version: u64,
}

fn xavier(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Vec<f64> {
    let a = (6.0 / (rows + cols) as f64).sqrt();
    (0..rows * cols).map(|_| rng.gen_range(-a..a)).collect()
}

impl EncoderState {
    /// Seeded initialization: Xavier-uniform projections, unit layer norms,
    /// zero (or fixed-scale) gates.
    pub fn init(cfg: EncoderConfig, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = cfg.d_model;
        let hidden = cfg.hidden();
        let tokens = cfg.tokens();
        let gate_value = match cfg.gate_mode {
            GateMode::Learnable => 0.0,
            GateMode::Fixed(s) => s,
        };
        let layers = (0..cfg.layers)
            .map(|_| LayerParams {
                ln1_g: vec![1.0; d],
                ln1_b: vec![0.0; d],
                wq: xavier(&mut rng, d, d),
                bq: vec![0.0; d],
                wk: xavier(&mut rng, d, d),
                bk: vec![0.0; d],
                wv: xavier(&mut rng, d, d),
                bv: vec![0.0; d],
                wo: xavier(&mut rng, d, d),
                bo: vec![0.0; d],
                ln2_g: vec![1.0; d],
                ln2_b: vec![0.0; d],
                w1: xavier(&mut rng, hidden, d),
                b1: vec![0.0; hidden],
                w2: xavier(&mut rng, d, hidden),
                b2: vec![0.0; d],
            })
            .collect();
        let apa = (0..cfg.apa_layers)
            .map(|_| ApaParams {
                wq: xavier(&mut rng, d, d),
                bq: vec![0.0; d],
                wk: xavier(&mut rng, d, d),
                bk: vec![0.0; d],
                wv: xavier(&mut rng, d, d),
                bv: vec![0.0; d],
                wo: xavier(&mut rng, d, d),
                bo: vec![0.0; d],
                gate: vec![gate_value; d],
            })
            .collect();
        Ok(Self {
            patch_w: xavier(&mut rng, d, cfg.patch_dim()),
            patch_b: vec![0.0; d],
            cls: (0..d).map(|_| rng.gen_range(-0.02..0.02)).collect(),
            pos: (0..tokens * d).map(|_| rng.gen_range(-0.02..0.02)).collect(),
            layers,
            apa,
            lnf_g: vec![1.0; d],
            lnf_b: vec![0.0; d],
            cfg,
            version: 0,
        })
    }

    /// Same tensor layout, all zeros: the gradient accumulator.
    pub fn zeros_like(&self) -> Self {
        let mut out = self.clone();
        out.for_each_tensor_mut(|_, t| t.iter_mut().for_each(|v| *v = 0.0));
        out.version = 0;
        out
    }

    /// Visit every parameter tensor in declaration order.
    pub fn for_each_tensor<'a, F: FnMut(&str, &'a [f64])>(&'a self, mut f: F) {
        f("patch_w", &self.patch_w);
        f("patch_b", &self.patch_b);
        f("cls", &self.cls);
        f("pos", &self.pos);
        for (i, l) in self.layers.iter().enumerate() {
            let each: [(&str, &Vec<f64>); 16] = [
                ("ln1_g", &l.ln1_g),
                ("ln1_b", &l.ln1_b),
                ("wq", &l.wq),
                ("bq", &l.bq),
                ("wk", &l.wk),
                ("bk", &l.bk),
                ("wv", &l.wv),
                ("bv", &l.bv),
                ("wo", &l.wo),
                ("bo", &l.bo),
                ("ln2_g", &l.ln2_g),
                ("ln2_b", &l.ln2_b),
                ("w1", &l.w1),
                ("b1", &l.b1),
                ("w2", &l.w2),
                ("b2", &l.b2),
            ];
            for (name, t) in each {
                f(&format!("layer{i}.{name}"), t);
            }
        }
        for (i, a) in self.apa.iter().enumerate() {
            let layer = self.cfg.first_apa_layer() + i;
            let each: [(&str, &Vec<f64>); 9] = [
                ("wq", &a.wq),
                ("bq", &a.bq),
                ("wk", &a.wk),
                ("bk", &a.bk),
                ("wv", &a.wv),
                ("bv", &a.bv),
                ("wo", &a.wo),
                ("bo", &a.bo),
                ("gate", &a.gate),
            ];
            for (name, t) in each {
                f(&format!("layer{layer}.apa.{name}"), t);
            }
        }
        f("final_norm.g", &self.lnf_g);
        f("final_norm.b", &self.lnf_b);
    }

    /// Mutable visit, same order as [`Self::for_each_tensor`].
    pub fn for_each_tensor_mut<F: FnMut(&str, &mut Vec<f64>)>(&mut self, mut f: F) {
        f("patch_w", &mut self.patch_w);
        f("patch_b", &mut self.patch_b);
        f("cls", &mut self.cls);
        f("pos", &mut self.pos);
        let first_apa = self.cfg.first_apa_layer();
        for (i, l) in self.layers.iter_mut().enumerate() {
            let each: [(&str, &mut Vec<f64>); 16] = [
                ("ln1_g", &mut l.ln1_g),
                ("ln1_b", &mut l.ln1_b),
                ("wq", &mut l.wq),
                ("bq", &mut l.bq),
                ("wk", &mut l.wk),
                ("bk", &mut l.bk),
                ("wv", &mut l.wv),
                ("bv", &mut l.bv),
                ("wo", &mut l.wo),
                ("bo", &mut l.bo),
                ("ln2_g", &mut l.ln2_g),
                ("ln2_b", &mut l.ln2_b),
                ("w1", &mut l.w1),
                ("b1", &mut l.b1),
                ("w2", &mut l.w2),
                ("b2", &mut l.b2),
            ];
            for (name, t) in each {
                f(&format!("layer{i}.{name}"), t);
            }
        }
        for (i, a) in self.apa.iter_mut().enumerate() {
            let layer = first_apa + i;
            let each: [(&str, &mut Vec<f64>); 9] = [
                ("wq", &mut a.wq),
                ("bq", &mut a.bq),
                ("wk", &mut a.wk),
                ("bk", &mut a.bk),
                ("wv", &mut a.wv),
                ("bv", &mut a.bv),
                ("wo", &mut a.wo),
                ("bo", &mut a.bo),
                ("gate", &mut a.gate),
            ];
            for (name, t) in each {
                f(&format!("layer{layer}.apa.{name}"), t);
            }
        }
        f("final_norm.g", &mut self.lnf_g);
        f("final_norm.b", &mut self.lnf_b);
    }

    /// Number of parameter tensors.
    pub fn tensor_count(&self) -> usize {
        let mut n = 0;
        self.for_each_tensor(|_, _| n += 1);
        n
    }

    /// Fixed-scale gates are constants, not parameters.
    pub fn tensor_is_trainable(&self, name: &str) -> bool {
        if name.ends_with(".apa.gate") {
            matches!(self.cfg.gate_mode, GateMode::Learnable)
        } else {
            true
        }
    }
}
