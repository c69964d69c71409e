//! Dual-supervision incremental training: binary authenticity head plus
//! artifact-dimension head over the pooled feature, feature distillation
//! against the previous task's frozen encoder, and the fixed-then-dynamic
//! anchor schedule.

mod config;
mod loss;
mod optim;

pub use config::TrainConfig;
pub use loss::{loss_cls, loss_cls_grad, loss_dis, loss_ind, loss_ind_grad, loss_total};
pub use optim::Adam;

use crate::anchors::{match_dynamic, match_static, AnchorLibrary, MatchedAnchor, Polarity};
use crate::encoder::{backward, forward, EncoderState};
use crate::error::{Error, Result};
use crate::imgstat::Image;
use crate::indicators::{Dimension, IndicatorMatrix};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Binary head (2 x D) and artifact-dimension head (5 x D), biases separate.
#[derive(Debug, Clone, PartialEq)]
pub struct Heads {
    pub wb: Vec<f64>,
    pub bb: Vec<f64>,
    pub wm: Vec<f64>,
    pub bm: Vec<f64>,
    pub dim: usize,
}

impl Heads {
    pub fn init(dim: usize, seed: u64) -> Self {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = (6.0 / (dim + 5) as f64).sqrt();
        Self {
            wb: (0..2 * dim).map(|_| rng.gen_range(-a..a)).collect(),
            bb: vec![0.0; 2],
            wm: (0..5 * dim).map(|_| rng.gen_range(-a..a)).collect(),
            bm: vec![0.0; 5],
            dim,
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            wb: vec![0.0; self.wb.len()],
            bb: vec![0.0; 2],
            wm: vec![0.0; self.wm.len()],
            bm: vec![0.0; 5],
            dim: self.dim,
        }
    }

    pub fn for_each_tensor<'a, F: FnMut(&str, &'a [f64])>(&'a self, mut f: F) {
        f("head.binary.w", &self.wb);
        f("head.binary.b", &self.bb);
        f("head.multi.w", &self.wm);
        f("head.multi.b", &self.bm);
    }

    pub fn for_each_tensor_mut<F: FnMut(&str, &mut Vec<f64>)>(&mut self, mut f: F) {
        f("head.binary.w", &mut self.wb);
        f("head.binary.b", &mut self.bb);
        f("head.multi.w", &mut self.wm);
        f("head.multi.b", &mut self.bm);
    }

    pub fn binary_logits(&self, feature: &[f64]) -> [f64; 2] {
        let mut out = [self.bb[0], self.bb[1]];
        for (o, item) in out.iter_mut().enumerate() {
            *item += crate::anchors::dot(feature, &self.wb[o * self.dim..(o + 1) * self.dim]);
        }
        out
    }

    pub fn multi_logits(&self, feature: &[f64]) -> [f64; 5] {
        let mut out = [0.0; 5];
        for o in 0..5 {
            out[o] =
                self.bm[o] + crate::anchors::dot(feature, &self.wm[o * self.dim..(o + 1) * self.dim]);
        }
        out
    }
}

/// One labeled training image with masks and its cached indicator matrix.
#[derive(Debug, Clone)]
pub struct TrainSample {
    pub image: Image,
    pub label: Polarity,
    /// Artifact dimensions the generator injected; all false for reals.
    pub y_ind: [bool; 5],
    /// Raw indicator matrix, computed once at dataset build time.
    pub matrix: IndicatorMatrix,
}

impl TrainSample {
    pub fn validate(&self) -> Result<()> {
        if self.label == Polarity::Real && self.y_ind.iter().any(|b| *b) {
            return Err(Error::InvalidInput(
                "real samples must carry an all-zero artifact vector".into(),
            ));
        }
        Ok(())
    }
}

/// Frozen previous-task teacher: encoder parameters and the anchor library
/// it was trained with.
#[derive(Debug, Clone)]
pub struct TaskSnapshot {
    pub encoder: EncoderState,
    pub library: AnchorLibrary,
}

/// Artifact-dimension target from the matched anchors: reals are all-zero,
/// fakes set the bit of every matched dimension.
pub fn make_ind_target(label: Polarity, matched: &[MatchedAnchor]) -> [bool; 5] {
    let mut y = [false; 5];
    if label == Polarity::Fake {
        for m in matched {
            y[m.channel.dimension.index()] = true;
        }
    }
    y
}

/// Which anchors accompany a sample at this epoch: indicator-ranked while
/// `epoch <= n`, cosine-matched against the injection-free pooled feature
/// afterwards. A degenerate zero feature falls back to the static match.
pub fn select_anchors_for_step(
    epoch: usize,
    scored: &IndicatorMatrix,
    label: Polarity,
    image: &Image,
    encoder: &EncoderState,
    lib: &AnchorLibrary,
    cfg: &TrainConfig,
) -> Result<Vec<MatchedAnchor>> {
    if epoch <= cfg.warmup_epochs {
        return match_static(scored, lib, label, cfg.anchors_n);
    }
    let probe = forward(encoder, image, &[])?;
    if probe.feature.iter().all(|v| *v == 0.0) {
        return match_static(scored, lib, label, cfg.anchors_n);
    }
    match_dynamic(&probe.feature, lib, label, cfg.anchors_n)
}

/// One row of the training log CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRow {
    pub epoch: usize,
    pub batch: usize,
    pub loss_total: f64,
    pub loss_cls: f64,
    pub loss_ind: f64,
    pub loss_dis: f64,
}

pub fn log_to_csv(rows: &[LogRow]) -> String {
    let mut out = String::from("epoch,batch,loss_total,loss_cls,loss_ind,loss_dis\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{:.6},{:.6},{:.6},{:.6}\n",
            r.epoch, r.batch, r.loss_total, r.loss_cls, r.loss_ind, r.loss_dis
        ));
    }
    out
}

/// Result of one task: the batch-level loss log and the frozen snapshot that
/// becomes the next task's distillation teacher.
#[derive(Debug, Clone)]
pub struct TaskReport {
    pub log: Vec<LogRow>,
    pub snapshot: TaskSnapshot,
}

/// Train encoder and heads on one task.
///
/// `inject` gates cross-attention injection (false under the no-APA
/// ablation; anchors are still matched because they define the artifact
/// targets). Distillation is active whenever a snapshot is present and the
/// teacher consumes the same matched anchors as the student.
pub fn train_task(
    task: &[TrainSample],
    encoder: &mut EncoderState,
    heads: &mut Heads,
    snapshot: Option<&TaskSnapshot>,
    lib: &AnchorLibrary,
    cfg: &TrainConfig,
    inject: bool,
) -> Result<TaskReport> {
    if task.is_empty() {
        return Err(Error::InvalidInput("task has no training samples".into()));
    }
    for s in task {
        s.validate()?;
    }
    // anomaly scores against this task's own calibration
    let raw: Vec<IndicatorMatrix> = task.iter().map(|s| s.matrix.clone()).collect();
    let normalizer = crate::indicators::ChannelNormalizer::fit(&raw)?;
    let scored: Vec<IndicatorMatrix> = raw.iter().map(|m| normalizer.anomaly_scores(m)).collect();

    let d = encoder.cfg.d_model;
    let mut adam = Adam::new(encoder, heads, cfg);
    let mut log = Vec::new();
    let mut order: Vec<usize> = (0..task.len()).collect();
    for epoch in 1..=cfg.epochs {
        let mut shuffle_rng =
            ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x0100_0000_01b3).wrapping_add(epoch as u64));
        order.shuffle(&mut shuffle_rng);
        for (batch_idx, chunk) in order.chunks(cfg.batch).enumerate() {
            let mut enc_grads = encoder.zeros_like();
            let mut head_grads = heads.zeros_like();
            let mut sums = (0.0, 0.0, 0.0, 0.0); // total, cls, ind, dis
            for &sample_idx in chunk {
                let sample = &task[sample_idx];
                let matched = select_anchors_for_step(
                    epoch,
                    &scored[sample_idx],
                    sample.label,
                    &sample.image,
                    encoder,
                    lib,
                    cfg,
                )?;
                let anchor_embs: Vec<Vec<f64>> = if inject {
                    matched.iter().map(|m| m.embedding.clone()).collect()
                } else {
                    Vec::new()
                };
                let trace = forward(encoder, &sample.image, &anchor_embs)?;
                let feature = &trace.feature;

                let logits_bin = heads.binary_logits(feature);
                let logits_ind = heads.multi_logits(feature);
                let y_bin = match sample.label {
                    Polarity::Real => 0usize,
                    Polarity::Fake => 1usize,
                };
                let y_ind = make_ind_target(sample.label, &matched);

                let (l_cls, d_bin) = loss_cls_grad(&logits_bin, y_bin);
                let (l_ind, d_ind) = loss_ind_grad(&logits_ind, &y_ind);
                let (l_dis, d_feat_dis) = match snapshot {
                    Some(snap) => {
                        let teacher = forward(&snap.encoder, &sample.image, &anchor_embs)?;
                        let l = loss_dis(feature, &teacher.feature)?;
                        let g: Vec<f64> = feature
                            .iter()
                            .zip(&teacher.feature)
                            .map(|(a, b)| 2.0 * (a - b))
                            .collect();
                        (l, g)
                    }
                    None => (0.0, vec![0.0; d]),
                };
                let total = loss_total(l_cls, l_ind, l_dis, cfg.mu1, cfg.mu2);
                if !total.is_finite() {
                    return Err(Error::TrainingDiverged(batch_idx));
                }
                sums.0 += total;
                sums.1 += l_cls;
                sums.2 += l_ind;
                sums.3 += l_dis;

                // head gradients and dL/dF, trade-offs folded in
                let mut d_feature = vec![0.0; d];
                for o in 0..2 {
                    head_grads.bb[o] += d_bin[o];
                    for i in 0..d {
                        head_grads.wb[o * d + i] += d_bin[o] * feature[i];
                        d_feature[i] += d_bin[o] * heads.wb[o * d + i];
                    }
                }
                for o in 0..5 {
                    let g = cfg.mu1 * d_ind[o];
                    head_grads.bm[o] += g;
                    for i in 0..d {
                        head_grads.wm[o * d + i] += g * feature[i];
                        d_feature[i] += g * heads.wm[o * d + i];
                    }
                }
                for i in 0..d {
                    d_feature[i] += cfg.mu2 * d_feat_dis[i];
                }
                backward(encoder, &trace, &d_feature, &mut enc_grads)?;
            }
            let scale = 1.0 / chunk.len() as f64;
            enc_grads.for_each_tensor_mut(|_, t| t.iter_mut().for_each(|v| *v *= scale));
            head_grads.for_each_tensor_mut(|_, t| t.iter_mut().for_each(|v| *v *= scale));
            adam.step(encoder, heads, &enc_grads, &head_grads);
            log.push(LogRow {
                epoch,
                batch: batch_idx,
                loss_total: sums.0 * scale,
                loss_cls: sums.1 * scale,
                loss_ind: sums.2 * scale,
                loss_dis: sums.3 * scale,
            });
        }
    }
    Ok(TaskReport {
        log,
        snapshot: TaskSnapshot {
            encoder: encoder.clone(),
            library: lib.clone(),
        },
    })
}

/// Dimensions in canonical order, for mapping `y_ind` bits to names.
pub fn dimension_order() -> [Dimension; 5] {
    Dimension::ALL
}

#[cfg(test)]
mod tests;
