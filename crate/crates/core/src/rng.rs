//! Seeded sub-streams.
//!
//! Every random draw in the crate comes from a ChaCha20 stream keyed by the
//! user seed and selected by a tag tuple, so a codebook or optimizer start can
//! be regenerated without replaying anything drawn before it.

use rand::Rng;
use rand_chacha::ChaCha20Rng;
use rand_core::SeedableRng;

pub(crate) const TAG_OPTIMIZER_START: u64 = 1;
pub(crate) const TAG_COMMON_CODEBOOK: u64 = 2;
pub(crate) const TAG_PRIVATE_X: u64 = 3;
pub(crate) const TAG_PRIVATE_Y: u64 = 4;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The ChaCha20 stream for `seed` selected by `tags`.
pub fn substream(seed: u64, tags: &[u64]) -> ChaCha20Rng {
    let stream = tags.iter().fold(0x5EED_u64, |h, &t| splitmix(h ^ t));
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw from the probability simplex of the given size.
pub(crate) fn flat_simplex<R: Rng>(rng: &mut R, len: usize) -> alloc::vec::Vec<f64> {
    let mut w: alloc::vec::Vec<f64> = (0..len)
        .map(|_| -libm::log(1.0 - rng.random::<f64>()))
        .collect();
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// Inverse-CDF draw from a probability vector.
pub(crate) fn categorical<R: Rng>(rng: &mut R, weights: &[f64]) -> usize {
    let target = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return i;
        }
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}
