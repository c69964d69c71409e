//! The semantic anchor library: per-channel contrastive real/fake text pairs
//! with embeddings, selected against support exemplars and retrieved either
//! by indicator rank (static) or by cosine similarity (dynamic).

mod embed;
pub mod io;

pub use embed::toy_embed;

use crate::error::{Error, Result};
use crate::indicators::{Channel, IndicatorMatrix, CHANNELS, CHANNEL_COUNT};
use std::collections::HashMap;

const UNIT_NORM_TOL: f64 = 1e-6;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Cosine similarity; zero whenever either vector is zero.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    dot(a, b) / (na * nb)
}

fn check_unit(v: &[f64], what: &str) -> Result<()> {
    if (norm(v) - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::InvalidInput(format!(
            "{what} must be unit-norm, got |v| = {}",
            norm(v)
        )));
    }
    Ok(())
}

/// Whether a text describes the authentic or the forged side of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarity {
    Real,
    Fake,
}

/// One contrastive real/fake text pair with unit-norm embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct TextCandidatePair {
    pub real_text: String,
    pub fake_text: String,
    pub real_embedding: Vec<f64>,
    pub fake_embedding: Vec<f64>,
}

impl TextCandidatePair {
    pub fn new(
        real_text: impl Into<String>,
        fake_text: impl Into<String>,
        real_embedding: Vec<f64>,
        fake_embedding: Vec<f64>,
    ) -> Result<Self> {
        if real_embedding.len() != fake_embedding.len() {
            return Err(Error::InvalidInput(
                "embedding dimensions differ within a pair".into(),
            ));
        }
        check_unit(&real_embedding, "real embedding")?;
        check_unit(&fake_embedding, "fake embedding")?;
        Ok(Self {
            real_text: real_text.into(),
            fake_text: fake_text.into(),
            real_embedding,
            fake_embedding,
        })
    }

    pub fn text(&self, polarity: Polarity) -> &str {
        match polarity {
            Polarity::Real => &self.real_text,
            Polarity::Fake => &self.fake_text,
        }
    }

    pub fn embedding(&self, polarity: Polarity) -> &[f64] {
        match polarity {
            Polarity::Real => &self.real_embedding,
            Polarity::Fake => &self.fake_embedding,
        }
    }
}

/// Embedded (real, fake) exemplar pairs for one channel.
#[derive(Debug, Clone)]
pub struct SupportSet {
    pairs: Vec<(Vec<f64>, Vec<f64>)>,
}

impl SupportSet {
    pub fn new(pairs: Vec<(Vec<f64>, Vec<f64>)>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidInput("support set must be non-empty".into()));
        }
        for (real, fake) in &pairs {
            check_unit(real, "support real exemplar")?;
            check_unit(fake, "support fake exemplar")?;
        }
        Ok(Self { pairs })
    }

    pub fn pairs(&self) -> &[(Vec<f64>, Vec<f64>)] {
        &self.pairs
    }
}

/// The chosen text pair for one channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub channel: Channel,
    pub pair: TextCandidatePair,
}

/// Exactly one anchor per valid channel, in canonical channel order.
#[derive(Debug, Clone)]
pub struct AnchorLibrary {
    anchors: Vec<Anchor>,
    dim: usize,
}

impl AnchorLibrary {
    pub fn new(anchors: Vec<Anchor>) -> Result<Self> {
        if anchors.len() != CHANNEL_COUNT {
            return Err(Error::InvalidInput(format!(
                "library needs {CHANNEL_COUNT} anchors, got {}",
                anchors.len()
            )));
        }
        let dim = anchors[0].pair.real_embedding.len();
        let mut ordered = Vec::with_capacity(CHANNEL_COUNT);
        for ch in CHANNELS {
            let found = anchors
                .iter()
                .find(|a| a.channel == ch)
                .ok_or(Error::IncompleteLibrary(ch))?;
            if found.pair.real_embedding.len() != dim {
                return Err(Error::InvalidInput(
                    "inconsistent embedding dimension across anchors".into(),
                ));
            }
            ordered.push(found.clone());
        }
        Ok(Self {
            anchors: ordered,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn anchor(&self, ch: Channel) -> &Anchor {
        &self.anchors[ch.index()]
    }

    /// Anchors in canonical channel order.
    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }
}

/// One retrieved anchor with the polarity-side text and embedding.
#[derive(Debug, Clone)]
pub struct MatchedAnchor {
    pub channel: Channel,
    pub polarity: Polarity,
    pub text: String,
    pub embedding: Vec<f64>,
    pub score: f64,
}

/// Pick the candidate whose texts agree best with the support exemplars:
/// argmax over candidates of the summed real-real and fake-fake cosines.
/// Ties break toward the lowest candidate index.
pub fn select_anchor(
    channel: Channel,
    candidates: &[TextCandidatePair],
    support: &SupportSet,
) -> Result<Anchor> {
    if candidates.is_empty() {
        return Err(Error::InvalidInput("empty candidate list".into()));
    }
    let mut best = 0usize;
    let mut best_score = f64::NEG_INFINITY;
    for (idx, cand) in candidates.iter().enumerate() {
        let mut score = 0.0;
        for (real_x, fake_x) in support.pairs() {
            score += cosine(&cand.fake_embedding, fake_x) + cosine(&cand.real_embedding, real_x);
        }
        if score > best_score {
            best_score = score;
            best = idx;
        }
    }
    Ok(Anchor {
        channel,
        pair: candidates[best].clone(),
    })
}

/// Run anchor selection for every channel. Fails on the first channel whose
/// candidates or support are missing.
pub fn build_library(
    candidate_sets: &HashMap<Channel, Vec<TextCandidatePair>>,
    supports: &HashMap<Channel, SupportSet>,
) -> Result<AnchorLibrary> {
    let mut anchors = Vec::with_capacity(CHANNEL_COUNT);
    for ch in CHANNELS {
        let candidates = candidate_sets.get(&ch).ok_or(Error::IncompleteLibrary(ch))?;
        let support = supports.get(&ch).ok_or(Error::IncompleteLibrary(ch))?;
        anchors.push(select_anchor(ch, candidates, support)?);
    }
    AnchorLibrary::new(anchors)
}

fn take_top_n(
    mut keyed: Vec<(f64, Channel)>,
    lib: &AnchorLibrary,
    polarity: Polarity,
    n: usize,
) -> Vec<MatchedAnchor> {
    // descending score; ties break toward the canonical channel order
    keyed.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| a.1.index().cmp(&b.1.index()))
    });
    keyed
        .into_iter()
        .take(n)
        .map(|(score, ch)| {
            let pair = &lib.anchor(ch).pair;
            MatchedAnchor {
                channel: ch,
                polarity,
                text: pair.text(polarity).to_string(),
                embedding: pair.embedding(polarity).to_vec(),
                score,
            }
        })
        .collect()
}

/// Indicator-ranked retrieval: fakes take the N most anomalous channels with
/// their fake texts, reals the N least anomalous with their real texts.
pub fn match_static(
    mtx: &IndicatorMatrix,
    lib: &AnchorLibrary,
    label: Polarity,
    n: usize,
) -> Result<Vec<MatchedAnchor>> {
    if n == 0 || n > CHANNEL_COUNT {
        return Err(Error::InvalidInput(format!(
            "N must lie in 1..={CHANNEL_COUNT}, got {n}"
        )));
    }
    let anomaly = mtx
        .anomaly_values()
        .ok_or_else(|| Error::InvalidInput("matrix has no anomaly scores".into()))?;
    let keyed: Vec<(f64, Channel)> = CHANNELS
        .iter()
        .map(|ch| {
            let a = anomaly[ch.index()];
            // ranking key: fakes want the highest anomaly, reals the lowest
            let key = match label {
                Polarity::Fake => a,
                Polarity::Real => -a,
            };
            (key, *ch)
        })
        .collect();
    let mut matched = take_top_n(keyed, lib, label, n);
    for m in &mut matched {
        m.score = anomaly[m.channel.index()];
    }
    Ok(matched)
}

/// Cosine retrieval against the polarity-side anchor embeddings.
pub fn match_dynamic(
    feature: &[f64],
    lib: &AnchorLibrary,
    label: Polarity,
    n: usize,
) -> Result<Vec<MatchedAnchor>> {
    if n == 0 || n > CHANNEL_COUNT {
        return Err(Error::InvalidInput(format!(
            "N must lie in 1..={CHANNEL_COUNT}, got {n}"
        )));
    }
    if norm(feature) == 0.0 {
        return Err(Error::DegenerateFeature);
    }
    let keyed: Vec<(f64, Channel)> = CHANNELS
        .iter()
        .map(|ch| {
            let emb = lib.anchor(*ch).pair.embedding(label);
            (cosine(feature, emb), *ch)
        })
        .collect();
    Ok(take_top_n(keyed, lib, label, n))
}
