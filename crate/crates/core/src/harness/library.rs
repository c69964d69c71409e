//! Self-contained anchor library construction for the synthetic protocol:
//! seeded random unit candidate embeddings per channel, scored against
//! seeded support sets through the standard selection rule.

use crate::anchors::{build_library, AnchorLibrary, SupportSet, TextCandidatePair};
use crate::error::Result;
use crate::indicators::{Channel, CHANNELS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

pub fn synthetic_candidates(
    dim: usize,
    k: usize,
    seed: u64,
) -> HashMap<Channel, Vec<TextCandidatePair>> {
    let mut out = HashMap::new();
    for ch in CHANNELS {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_mul(0x517c_c1b7_2722_0a95)
                .wrapping_add(ch.index() as u64),
        );
        let candidates: Vec<TextCandidatePair> = (0..k)
            .map(|i| {
                TextCandidatePair::new(
                    format!("authentic {} {} v{i}", ch.region, ch.dimension),
                    format!("forged {} {} v{i}", ch.region, ch.dimension),
                    unit(&mut rng, dim),
                    unit(&mut rng, dim),
                )
                .expect("unit construction")
            })
            .collect();
        out.insert(ch, candidates);
    }
    out
}

pub fn synthetic_supports(dim: usize, seed: u64) -> HashMap<Channel, SupportSet> {
    let mut out = HashMap::new();
    for ch in CHANNELS {
        let mut rng = ChaCha8Rng::seed_from_u64(
            seed.wrapping_mul(0x2545_F491_4F6C_DD1D)
                .wrapping_add(ch.index() as u64),
        );
        let pairs = (0..3).map(|_| (unit(&mut rng, dim), unit(&mut rng, dim))).collect();
        out.insert(ch, SupportSet::new(pairs).expect("non-empty support"));
    }
    out
}

/// Library for a `dim`-dimensional encoder: selection over `k` seeded random
/// candidates per channel.
pub fn synthetic_library(dim: usize, k: usize, seed: u64) -> Result<AnchorLibrary> {
    build_library(&synthetic_candidates(dim, k, seed), &synthetic_supports(dim, seed))
}
