//! Deterministic stream derivation from a single master seed.
//!
//! Every randomized component draws from its own ChaCha8 stream, derived from
//! `(master seed, component label, index)`. ChaCha is counter based, so a
//! derived stream never depends on how much randomness another component
//! consumed. Reports echo the master seed; re-running with the same seed
//! reproduces every dataset bit for bit.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// RNG for component `label`, stream `index`, under `master`.
pub fn derive_rng(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    let mut state = master ^ fnv1a(label);
    let mut seed = [0u8; 32];
    for chunk in seed.chunks_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(seed);
    rng.set_stream(index);
    rng
}

/// A plain `u64` sub-seed, for APIs that take a seed rather than an RNG.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut state = master ^ fnv1a(label) ^ index.wrapping_mul(0xd1b5_4a32_d192_ed03);
    splitmix64(&mut state)
}
