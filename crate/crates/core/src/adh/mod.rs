//! Adaptive decision harmonization: after each task, classifier head
//! directions are merged with the affinity-weighted history on the unit
//! hypersphere and rescaled back to their original norm. LERP/EMA/WM
//! baselines mirror the ablation variants.

pub mod archive;

use crate::anchors::{cosine, dot, norm};
use crate::error::{Error, Result};
use crate::trainer::Heads;

pub const DEFAULT_TAU: f64 = 0.1;
pub const DEFAULT_EMA_ALPHA: f64 = 0.9;

/// Which head a vector came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HeadKind {
    Binary,
    Multilabel,
}

impl HeadKind {
    pub const ALL: [HeadKind; 2] = [HeadKind::Binary, HeadKind::Multilabel];

    pub fn tag(self) -> u8 {
        match self {
            HeadKind::Binary => 0,
            HeadKind::Multilabel => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Result<Self> {
        match tag {
            0 => Ok(HeadKind::Binary),
            1 => Ok(HeadKind::Multilabel),
            other => Err(Error::Parse(format!("unknown head kind tag {other}"))),
        }
    }
}

/// A flattened head weight matrix (bias excluded) split into direction and
/// magnitude.
#[derive(Debug, Clone, PartialEq)]
pub struct HeadVector {
    /// Unit direction.
    pub unit: Vec<f64>,
    /// Euclidean norm of the original weights.
    pub norm: f64,
    pub kind: HeadKind,
    pub task_id: u32,
}

impl HeadVector {
    /// Normalize a flat weight matrix into direction + norm.
    pub fn from_flat(flat: &[f64], kind: HeadKind, task_id: u32) -> Result<Self> {
        let n = norm(flat);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidInput(
                "head weights must be finite and non-zero".into(),
            ));
        }
        Ok(Self {
            unit: flat.iter().map(|v| v / n).collect(),
            norm: n,
            kind,
            task_id,
        })
    }

    /// Weights restored to the stored norm.
    pub fn rescaled(&self) -> Vec<f64> {
        rescale(&self.unit, self.norm)
    }
}

/// Ordered per-kind history of normalized head directions.
#[derive(Debug, Clone, Default)]
pub struct TaskHeadArchive {
    entries: Vec<HeadVector>,
}

impl TaskHeadArchive {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, v: HeadVector) {
        self.entries.push(v);
    }

    pub fn of_kind(&self, kind: HeadKind) -> Vec<&HeadVector> {
        self.entries.iter().filter(|e| e.kind == kind).collect()
    }

    pub fn entries(&self) -> &[HeadVector] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Softmax over `cos(current, archived) / tau` for the archived directions.
pub fn affinity_weights(current: &[f64], history: &[&HeadVector], tau: f64) -> Result<Vec<f64>> {
    if history.is_empty() {
        return Err(Error::NoHistory);
    }
    if tau <= 0.0 {
        return Err(Error::InvalidInput("temperature must be positive".into()));
    }
    let scores: Vec<f64> = history
        .iter()
        .map(|h| cosine(current, &h.unit) / tau)
        .collect();
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    Ok(exps.into_iter().map(|e| e / z).collect())
}

/// Normalized affinity-weighted aggregate of the archived directions.
pub fn global_reference(history: &[&HeadVector], weights: &[f64]) -> Result<Vec<f64>> {
    if history.is_empty() {
        return Err(Error::NoHistory);
    }
    let dim = history[0].unit.len();
    let mut agg = vec![0.0; dim];
    for (h, w) in history.iter().zip(weights) {
        for (a, v) in agg.iter_mut().zip(&h.unit) {
            *a += w * v;
        }
    }
    let n = norm(&agg);
    if n < 1e-12 {
        return Err(Error::DegenerateReference);
    }
    Ok(agg.into_iter().map(|v| v / n).collect())
}

/// Alignment coefficient: cosine similarity clamped into [0, 1].
pub fn adaptive_t(current: &[f64], reference: &[f64]) -> f64 {
    cosine(current, reference).clamp(0.0, 1.0)
}

const SLERP_EPS: f64 = 1e-8;

/// Spherical interpolation from `a` toward `b` along the geodesic.
pub fn slerp(a: &[f64], b: &[f64], t: f64) -> Result<Vec<f64>> {
    let theta = dot(a, b).clamp(-1.0, 1.0).acos();
    if theta < SLERP_EPS {
        return Ok(a.to_vec());
    }
    if theta > std::f64::consts::PI - SLERP_EPS {
        return Err(Error::UndefinedGeodesic);
    }
    let sin_theta = theta.sin();
    let ca = ((1.0 - t) * theta).sin() / sin_theta;
    let cb = (t * theta).sin() / sin_theta;
    Ok(a.iter().zip(b).map(|(x, y)| ca * x + cb * y).collect())
}

/// Restore a unit direction to the original magnitude.
pub fn rescale(unit: &[f64], original_norm: f64) -> Vec<f64> {
    unit.iter().map(|v| v * original_norm).collect()
}

/// Head-alignment method: geodesic rotation or one of the ablation baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlignMethod {
    Slerp,
    Lerp,
    Ema(f64),
    WeightedMean,
}

impl AlignMethod {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "slerp" => Ok(AlignMethod::Slerp),
            "lerp" => Ok(AlignMethod::Lerp),
            "ema" => Ok(AlignMethod::Ema(DEFAULT_EMA_ALPHA)),
            "wm" => Ok(AlignMethod::WeightedMean),
            other => Err(Error::Parse(format!("unknown alignment method {other:?}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            AlignMethod::Slerp => "slerp",
            AlignMethod::Lerp => "lerp",
            AlignMethod::Ema(_) => "ema",
            AlignMethod::WeightedMean => "wm",
        }
    }
}

fn normalize_or(v: Vec<f64>) -> Result<Vec<f64>> {
    let n = norm(&v);
    if n < 1e-12 {
        return Err(Error::DegenerateReference);
    }
    Ok(v.into_iter().map(|x| x / n).collect())
}

/// Align one flat head against its archive history; returns the new flat
/// weights (norm preserved) and the post-alignment unit direction.
fn align_flat(
    flat: &[f64],
    kind: HeadKind,
    task_id: u32,
    history: &[&HeadVector],
    tau: f64,
    method: AlignMethod,
) -> Result<(Vec<f64>, HeadVector)> {
    let current = HeadVector::from_flat(flat, kind, task_id)?;
    let omega = affinity_weights(&current.unit, history, tau)?;
    let reference = global_reference(history, &omega)?;
    let t = adaptive_t(&current.unit, &reference);
    let new_unit = match method {
        AlignMethod::Slerp => slerp(&current.unit, &reference, t)?,
        AlignMethod::Lerp => {
            let mixed: Vec<f64> = current
                .unit
                .iter()
                .zip(&reference)
                .map(|(a, b)| (1.0 - t) * a + t * b)
                .collect();
            normalize_or(mixed)?
        }
        AlignMethod::Ema(alpha) => {
            let mixed: Vec<f64> = current
                .unit
                .iter()
                .zip(&reference)
                .map(|(a, b)| (1.0 - alpha) * a + alpha * b)
                .collect();
            normalize_or(mixed)?
        }
        AlignMethod::WeightedMean => {
            // affinity-style weights over the current direction and history
            let mut pool: Vec<&HeadVector> = vec![&current];
            pool.extend_from_slice(history);
            let w = affinity_weights(&current.unit, &pool, tau)?;
            let mut agg = vec![0.0; current.unit.len()];
            for (h, wi) in pool.iter().zip(&w) {
                for (a, v) in agg.iter_mut().zip(&h.unit) {
                    *a += wi * v;
                }
            }
            normalize_or(agg)?
        }
    };
    let flat_new = rescale(&new_unit, current.norm);
    Ok((
        flat_new,
        HeadVector {
            unit: new_unit,
            norm: current.norm,
            kind,
            task_id,
        },
    ))
}

/// Harmonize both heads against the archive and append the post-alignment
/// directions. An empty archive is the first task: heads pass through
/// unchanged and only seed the archive. Biases are never touched. On error
/// the heads and archive are left unmodified.
pub fn harmonize(
    heads: &Heads,
    archive: &mut TaskHeadArchive,
    task_id: u32,
    tau: f64,
    method: AlignMethod,
) -> Result<Heads> {
    let mut out = heads.clone();
    let mut appended = Vec::new();
    {
        let plan: [(HeadKind, &[f64]); 2] =
            [(HeadKind::Binary, &heads.wb), (HeadKind::Multilabel, &heads.wm)];
        for (kind, flat) in plan {
            let history = archive.of_kind(kind);
            if history.is_empty() {
                appended.push(HeadVector::from_flat(flat, kind, task_id)?);
                continue;
            }
            let (flat_new, stored) = align_flat(flat, kind, task_id, &history, tau, method)?;
            match kind {
                HeadKind::Binary => out.wb = flat_new,
                HeadKind::Multilabel => out.wm = flat_new,
            }
            appended.push(stored);
        }
    }
    for v in appended {
        archive.push(v);
    }
    Ok(out)
}
