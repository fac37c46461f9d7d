//! Seeded, splittable randomness.
//!
//! Every random decision in a run draws from a substream derived from
//! `(seed, stream kind, robot id, step)`, so adding a new consumer never
//! perturbs the draws of existing ones and runs are reproducible from the
//! config alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifies the consumer of a substream.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Initial robot placement.
    Placement = 1,
    /// Per-cell deposit noise draws.
    Epsilon = 2,
    /// Tie-breaking in move selection.
    TieBreak = 3,
    /// Forager reply-throttle decisions.
    Reply = 4,
    /// Per-delivery packet loss.
    Loss = 5,
    /// Stochastic move sampling.
    Stochastic = 6,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent RNG for `(seed, stream, robot, step)`.
pub fn substream(seed: u64, stream: Stream, robot: u64, step: u64) -> ChaCha8Rng {
    let mut h = splitmix64(seed);
    h = splitmix64(h ^ (stream as u64).wrapping_mul(0xa076_1d64_78bd_642f));
    h = splitmix64(h ^ robot.wrapping_mul(0xe703_7ed1_a0b4_28db));
    h = splitmix64(h ^ step.wrapping_mul(0x8ebc_6af0_9c88_c6e3));
    ChaCha8Rng::seed_from_u64(h)
}
