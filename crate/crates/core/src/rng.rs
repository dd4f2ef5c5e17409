//! Seed handling.
//!
//! All randomness derives from one `u64` seed. Independent consumers get
//! their own ChaCha stream, so a trial's draws depend only on `(seed, stream)`
//! and never on how work was scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Derives a child seed from a parent seed and a label (splitmix64 finaliser).
pub fn derive(seed: u64, label: u64) -> u64 {
    let mut z = seed
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(label.wrapping_mul(0xD1B5_4A32_D192_ED03));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
