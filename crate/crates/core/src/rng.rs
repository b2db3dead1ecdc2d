//! Counter-based substream derivation.
//!
//! Every consumer of randomness receives a `ChaCha8Rng` keyed by
//! `(master_seed, substream_id)`. Distinct ids give statistically independent
//! streams, and a replicate's stream never depends on scheduling, so results
//! are bit-identical regardless of worker count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A 64-bit key for a derived stream, usable wherever a plain seed is stored.
pub fn derive_seed(master_seed: u64, substream_id: u64) -> u64 {
    let mut state = master_seed;
    let a = splitmix64(&mut state);
    let mut state2 = substream_id ^ 0xD1B5_4A32_D192_ED03;
    let b = splitmix64(&mut state2);
    let mut state3 = a ^ b.rotate_left(17);
    splitmix64(&mut state3)
}

/// The RNG for substream `substream_id` of `master_seed`.
pub fn substream(master_seed: u64, substream_id: u64) -> ChaCha8Rng {
    let mut state = derive_seed(master_seed, substream_id);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
