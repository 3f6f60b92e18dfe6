//! Counter-keyed random streams.
//!
//! Every random decision in a render is drawn from a stream keyed by
//! `(seed, pixel, sample, stream)`, so results do not depend on how work is
//! scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Sampler = ChaCha8Rng;

/// Stream tags keep eye and light walks of the same sample independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    Eye = 1,
    Light = 2,
    Verify = 3,
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn stream_key(seed: u64, pixel: u64, sample: u64, stream: Stream) -> u64 {
    let mut h = mix64(seed ^ 0x9e37_79b9_7f4a_7c15);
    h = mix64(h ^ pixel.wrapping_mul(0xd6e8_feb8_6659_fd93));
    h = mix64(h ^ sample.wrapping_mul(0xa076_1d64_78bd_642f));
    mix64(h ^ (stream as u64).wrapping_mul(0xe703_7ed1_a0b4_28db))
}

pub fn sampler(seed: u64, pixel: u64, sample: u64, stream: Stream) -> Sampler {
    ChaCha8Rng::seed_from_u64(stream_key(seed, pixel, sample, stream))
}
