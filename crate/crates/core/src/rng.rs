//! Seed derivation for reproducible, schedule-independent random streams.
//!
//! Every random consumer gets a ChaCha8 generator keyed by a derived 64-bit
//! seed and positioned on a stream selected by its replication (or chunk)
//! index. Two consumers never share a (key, stream) pair, so results do not
//! depend on how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags mixed into derived seeds.
pub mod tag {
    pub const SAMPLE: u64 = 0x5341_4d50_4c45_0001;
    pub const BAND: u64 = 0x4241_4e44_0000_0002;
    pub const SUP_NORM: u64 = 0x5355_504e_4f52_0003;
}

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes a base seed together with an ordered list of words.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    words
        .iter()
        .fold(splitmix64(seed), |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

/// Generator keyed by `key` and positioned at the start of stream `stream`.
pub fn stream_rng(key: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(key);
    rng.set_stream(stream);
    rng
}
