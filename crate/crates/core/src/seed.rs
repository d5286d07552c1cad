//! Deterministic seed splitting.
//!
//! Every random draw in a simulation is tied to `(root_seed, stream, index)`
//! through SplitMix64 finalisation, so results depend only on the root seed
//! and the position of a work unit, never on scheduling or thread count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent sub-streams drawn from one root seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Message = 1,
    Noise = 2,
    Filler = 3,
    Placement = 4,
    TieBreak = 5,
}

/// SplitMix64 output function.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for work unit `index` of `stream`: `mix(root ^ mix(stream, index))`.
pub fn derive(root: u64, stream: Stream, index: u64) -> u64 {
    let tag = splitmix64((stream as u64).wrapping_mul(0xD1B5_4A32_D192_ED03) ^ index);
    splitmix64(root ^ tag)
}

/// Second-level split, e.g. block `sub` inside trial `index`.
pub fn derive2(root: u64, stream: Stream, index: u64, sub: u64) -> u64 {
    splitmix64(derive(root, stream, index) ^ splitmix64(sub.wrapping_add(0xA076_1D64_78BD_642F)))
}

/// ChaCha8 generator seeded from a 64-bit value.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
