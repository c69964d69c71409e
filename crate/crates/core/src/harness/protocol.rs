//! Sequential incremental protocol: train task t, harmonize heads, evaluate
//! every test split seen so far.

use super::auc::auc;
use super::synth::{gen_synthetic_task, SyntheticSpec, TaskDataset};
use crate::adh::{harmonize, AlignMethod, TaskHeadArchive, DEFAULT_TAU};
use crate::anchors::{match_dynamic, AnchorLibrary, Polarity, CHANNELS};
use crate::encoder::{forward, EncoderConfig, EncoderState};
use crate::error::{Error, Result};
use crate::trainer::{train_task, Heads, LogRow, TaskSnapshot, TrainConfig, TrainSample};
use sha2::{Digest, Sha256};
use std::time::Instant;

/// Everything a protocol run needs beyond the per-task data specs.
#[derive(Debug, Clone)]
pub struct ProtocolConfig {
    pub train: TrainConfig,
    pub encoder: EncoderConfig,
    pub align: AlignMethod,
    pub tau: f64,
    /// Candidate pairs per channel when building the synthetic library.
    pub anchor_candidates: usize,
    /// false under `--no-adh`: heads are never harmonized or archived.
    pub use_adh: bool,
    /// false under `--no-apa`: injection disabled everywhere.
    pub use_apa: bool,
    /// false under `--no-ind`: the artifact-dimension loss weight is zero.
    pub use_ind: bool,
}

impl ProtocolConfig {
    pub fn desk_default(seed: u64) -> Self {
        Self {
            train: TrainConfig {
                seed,
                ..TrainConfig::default()
            },
            encoder: EncoderConfig::default(),
            align: AlignMethod::Slerp,
            tau: DEFAULT_TAU,
            anchor_candidates: 4,
            use_adh: true,
            use_apa: true,
            use_ind: true,
        }
    }

    /// Canonical textual echo; hashing this pins the run configuration.
    pub fn echo(&self) -> String {
        let e = &self.encoder;
        format!(
            "{}image_side={}\nin_channels={}\npatch_size={}\nd_model={}\nlayers={}\nheads={}\nmlp_ratio={}\napa_layers={}\ngate_mode={:?}\nalign={}\ntau={}\nanchor_candidates={}\nuse_adh={}\nuse_apa={}\nuse_ind={}\n",
            self.train.to_key_values(),
            e.image_side,
            e.in_channels,
            e.patch_size,
            e.d_model,
            e.layers,
            e.heads,
            e.mlp_ratio,
            e.apa_layers,
            e.gate_mode,
            self.align.name(),
            self.tau,
            self.anchor_candidates,
            self.use_adh,
            self.use_apa,
            self.use_ind,
        )
    }

    pub fn config_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.echo().as_bytes());
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Lower-triangular AUC matrix plus the run manifest data.
#[derive(Debug, Clone)]
pub struct ProtocolResult {
    /// `auc[s][e]`: AUC on task e's test split after finishing task s.
    pub auc: Vec<Vec<f64>>,
    /// Mean over the populated row entries per completed task.
    pub per_task_avg: Vec<f64>,
    pub config_hash: String,
    pub seed: u64,
    pub stage_seconds: Vec<(String, f64)>,
}

/// Trained artifacts handed back for persistence.
pub struct RunArtifacts {
    pub encoder: EncoderState,
    pub heads: Heads,
    pub library: AnchorLibrary,
    pub archive: TaskHeadArchive,
    pub train_log: Vec<LogRow>,
}

/// Test-time anchor retrieval is label-free: both polarity rankings are
/// computed from the injection-free pooled feature and the set with the
/// higher best cosine wins (ties to fake). A zero feature falls back to the
/// first N channels in canonical order with fake texts.
pub fn test_time_anchors(
    feature: &[f64],
    lib: &AnchorLibrary,
    n: usize,
) -> Result<Vec<Vec<f64>>> {
    if feature.iter().all(|v| *v == 0.0) {
        return Ok(CHANNELS
            .iter()
            .take(n)
            .map(|ch| lib.anchor(*ch).pair.fake_embedding.clone())
            .collect());
    }
    let fake = match_dynamic(feature, lib, Polarity::Fake, n)?;
    let real = match_dynamic(feature, lib, Polarity::Real, n)?;
    let pick = if fake[0].score >= real[0].score { fake } else { real };
    Ok(pick.into_iter().map(|m| m.embedding).collect())
}

/// Softmax fake-class probability from the binary head.
fn detection_score(heads: &Heads, feature: &[f64]) -> f64 {
    let logits = heads.binary_logits(feature);
    let m = logits[0].max(logits[1]);
    let e0 = (logits[0] - m).exp();
    let e1 = (logits[1] - m).exp();
    e1 / (e0 + e1)
}

/// Frame-level AUC of the current detector over one test split.
pub fn evaluate_split(
    samples: &[TrainSample],
    encoder: &EncoderState,
    heads: &Heads,
    lib: &AnchorLibrary,
    n_anchors: usize,
    use_apa: bool,
) -> Result<f64> {
    let mut scores = Vec::with_capacity(samples.len());
    let mut labels = Vec::with_capacity(samples.len());
    for s in samples {
        let anchors = if use_apa {
            let probe = forward(encoder, &s.image, &[])?;
            test_time_anchors(&probe.feature, lib, n_anchors)?
        } else {
            Vec::new()
        };
        let trace = forward(encoder, &s.image, &anchors)?;
        scores.push(detection_score(heads, &trace.feature));
        labels.push(match s.label {
            Polarity::Fake => 1u8,
            Polarity::Real => 0u8,
        });
    }
    auc(&scores, &labels)
}

/// Run the full incremental sequence over per-task data specs.
pub fn run_protocol(
    specs: &[SyntheticSpec],
    cfg: &ProtocolConfig,
) -> Result<(ProtocolResult, RunArtifacts)> {
    if specs.is_empty() {
        return Err(Error::InvalidInput("protocol needs at least one task".into()));
    }
    cfg.train.validate()?;
    cfg.encoder.validate()?;
    let mut stage_seconds = Vec::new();

    let setup_start = Instant::now();
    let library = super::library::synthetic_library(
        cfg.encoder.d_model,
        cfg.anchor_candidates,
        cfg.train.seed,
    )?;
    let mut datasets: Vec<TaskDataset> = Vec::with_capacity(specs.len());
    for (t, spec) in specs.iter().enumerate() {
        datasets.push(gen_synthetic_task(spec, t)?);
    }
    stage_seconds.push(("setup".to_string(), setup_start.elapsed().as_secs_f64()));

    let mut encoder = EncoderState::init(cfg.encoder, cfg.train.seed)?;
    let mut heads = Heads::init(cfg.encoder.d_model, cfg.train.seed.wrapping_add(1));
    let mut archive = TaskHeadArchive::new();
    let mut snapshot: Option<TaskSnapshot> = None;
    let mut auc_matrix: Vec<Vec<f64>> = Vec::new();
    let mut per_task_avg = Vec::new();
    let mut train_log = Vec::new();

    for (t, ds) in datasets.iter().enumerate() {
        let t_train = Instant::now();
        let mut task_cfg = cfg.train.clone();
        task_cfg.seed = cfg.train.seed.wrapping_add(t as u64);
        if !cfg.use_ind {
            task_cfg.mu1 = 0.0;
        }
        let report = train_task(
            &ds.train,
            &mut encoder,
            &mut heads,
            snapshot.as_ref(),
            &library,
            &task_cfg,
            cfg.use_apa,
        )?;
        train_log.extend(report.log.iter().cloned());
        snapshot = Some(report.snapshot);
        stage_seconds.push((format!("train_task{}", t + 1), t_train.elapsed().as_secs_f64()));

        if cfg.use_adh {
            let t_adh = Instant::now();
            heads = harmonize(&heads, &mut archive, t as u32, cfg.tau, cfg.align)?;
            stage_seconds.push((format!("harmonize_task{}", t + 1), t_adh.elapsed().as_secs_f64()));
        }

        let t_eval = Instant::now();
        let mut row = Vec::with_capacity(t + 1);
        for past in datasets.iter().take(t + 1) {
            row.push(evaluate_split(
                &past.test,
                &encoder,
                &heads,
                &library,
                cfg.train.anchors_n,
                cfg.use_apa,
            )?);
        }
        per_task_avg.push(row.iter().sum::<f64>() / row.len() as f64);
        auc_matrix.push(row);
        stage_seconds.push((format!("eval_task{}", t + 1), t_eval.elapsed().as_secs_f64()));
    }

    Ok((
        ProtocolResult {
            auc: auc_matrix,
            per_task_avg,
            config_hash: cfg.config_hash(),
            seed: cfg.train.seed,
            stage_seconds,
        },
        RunArtifacts {
            encoder,
            heads,
            library,
            archive,
            train_log,
        },
    ))
}
