//! Seeded randomness keyed by a stable identifier, independent of call order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Separates independent uses of one user seed.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub(crate) enum Domain {
    Shift = 1,
    Noise = 2,
    Subsample = 3,
    Generator = 4,
}

/// A generator for item `id` under `(seed, domain)`. Distinct ids get
/// distinct ChaCha streams of the same key.
pub(crate) fn keyed_rng(seed: u64, domain: Domain, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (domain as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(id);
    rng
}

/// First uniform draw in `[0, 1)` for item `id`.
pub(crate) fn keyed_uniform(seed: u64, domain: Domain, id: u64) -> f64 {
    keyed_rng(seed, domain, id).random::<f64>()
}
