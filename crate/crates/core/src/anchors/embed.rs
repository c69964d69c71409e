//! Deterministic toy text embedder. A stand-in for a frozen text encoder so
//! the end-to-end harness is self-contained: each channel owns a two-wide
//! coordinate block whose sign pattern separates real from fake, and the
//! remaining coordinates carry low-amplitude seeded noise.

use super::Polarity;
use crate::error::{Error, Result};
use crate::indicators::Channel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const NOISE_AMPLITUDE: f64 = 0.05;
pub const MIN_EMBED_DIM: usize = 40;

/// Deterministic unit embedding for one (channel, polarity).
///
/// Block `2 * channel.index()` carries `(+1, +1)` for fake and `(+1, -1)`
/// for real; everything else is seed-keyed noise of amplitude 0.05.
pub fn toy_embed(channel: Channel, polarity: Polarity, dim: usize, seed: u64) -> Result<Vec<f64>> {
    if dim < MIN_EMBED_DIM {
        return Err(Error::InvalidInput(format!(
            "embedding dimension must be >= {MIN_EMBED_DIM}, got {dim}"
        )));
    }
    let tag = match polarity {
        Polarity::Real => 1u64,
        Polarity::Fake => 2u64,
    };
    let stream = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add((channel.index() as u64) << 8)
        .wrapping_add(tag);
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let mut v: Vec<f64> = (0..dim)
        .map(|_| rng.gen_range(-NOISE_AMPLITUDE..NOISE_AMPLITUDE))
        .collect();
    let block = 2 * channel.index();
    v[block] = 1.0;
    v[block + 1] = match polarity {
        Polarity::Fake => 1.0,
        Polarity::Real => -1.0,
    };
    let n = super::norm(&v);
    for x in v.iter_mut() {
        *x /= n;
    }
    Ok(v)
}
