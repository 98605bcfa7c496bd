//! Seeded random instances and brute-force oracles that share no code with
//! the algorithms they check.

pub mod formulas;
pub mod generators;
pub mod oracles;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG every suite uses, so instance sets are stable across platforms.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
