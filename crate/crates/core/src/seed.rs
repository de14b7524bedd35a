//! Seed derivation: a master seed expands to per-purpose child seeds.
//!
//! The scheme is a fixed counter map: child `k` of master `m` is
//! `splitmix64(m + k·GOLDEN)`. Purposes get fixed counters so that
//! transformed measures re-use true scores while drawing fresh,
//! independent errors, and two populations never share a stream.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counter for the first population's true-score draw.
pub const STREAM_POPULATION_P1: u64 = 1;
/// Counter for the second population's true-score draw.
pub const STREAM_POPULATION_P2: u64 = 2;
/// Counter for a measure's error draw.
pub const STREAM_ERROR_DRAW: u64 = 3;
/// Counter for deriving a transformed measure's seed from its parent.
pub const STREAM_TRANSFORMED_MODEL: u64 = 4;

fn splitmix64(seed: u64) -> u64 {
    let mut z = seed.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for purpose counter `stream` under `master`.
pub fn child_seed(master: u64, stream: u64) -> u64 {
    splitmix64(master.wrapping_add(stream.wrapping_mul(GOLDEN)))
}
