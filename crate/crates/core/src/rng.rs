//! Seed handling.
//!
//! Every random component draws from a ChaCha8 stream keyed by
//! `(seed, stream id)`: the 64-bit seed selects the key, the [`Stream`]
//! selects one of ChaCha's independent 64-bit stream counters. One seed thus
//! reproduces a whole pipeline while its parts stay statistically independent.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    GameFactory = 1,
    Sampler = 2,
    Proxy = 3,
    MonteCarlo = 4,
    Permutation = 5,
    Experiment = 6,
}

pub fn stream(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
