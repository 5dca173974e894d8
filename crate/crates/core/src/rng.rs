//! Seeded randomness. Every random choice in the crate goes through
//! [`seeded`], a ChaCha8 stream keyed by a `u64`, so sample streams are
//! identical across platforms and runs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::gf2poly::Gf2Poly;

pub type Seed = u64;

pub fn seeded(seed: Seed) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform polynomial with exactly `count` free low bits (degree `< count`).
pub fn random_bits<R: Rng>(rng: &mut R, count: u64) -> Gf2Poly {
    let nwords = count.div_ceil(64) as usize;
    let mut words: Vec<u64> = (0..nwords).map(|_| rng.gen()).collect();
    let rem = count % 64;
    if rem != 0 {
        if let Some(top) = words.last_mut() {
            *top &= (1u64 << rem) - 1;
        }
    }
    Gf2Poly::from_words(words)
}

/// Uniform polynomial of degree exactly `n`.
pub fn random_of_degree<R: Rng>(rng: &mut R, n: u64) -> Gf2Poly {
    let mut f = random_bits(rng, n);
    f.toggle(n);
    f
}
