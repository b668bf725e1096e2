//! Keyed deterministic pseudorandom maps for strategy tables too large to
//! materialize, plus the seed-splitting rule used everywhere a master seed
//! fans out into per-task seeds.
//!
//! Not cryptographic. The only requirements are determinism and the absence
//! of accidental structure against the bit-level games played here.

/// Advance a splitmix64 state and return the next output word.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed for stream `stream` of a master seed.
///
/// The rule is fixed and documented so experiment reports can be reproduced
/// from (master, stream) alone: run one splitmix64 step on
/// `master + stream * odd constant`. Distinct streams give distinct states,
/// and the mixer decorrelates them.
pub fn child_seed(master: u64, stream: u64) -> u64 {
    let mut s = master.wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03));
    splitmix64(&mut s)
}
