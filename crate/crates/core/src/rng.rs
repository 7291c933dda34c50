//! Named random streams fanned out from one run seed.
//!
//! Every consumer gets its own ChaCha20 stream keyed by the run seed, so
//! adding draws to one component never perturbs another.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    /// Haar rotations of the snapshot bag.
    Haar,
    /// Born-rule outcomes in simulated tomography.
    Born,
    /// Start vectors of the exact-diagonalization iteration.
    LanczosStart,
}

impl Stream {
    fn id(self) -> u64 {
        match self {
            Stream::Haar => 1,
            Stream::Born => 2,
            Stream::LanczosStart => 3,
        }
    }
}

pub fn stream(seed: u64, which: Stream) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(which.id());
    rng
}

/// Child seed for the `index`-th independent job of a run (SplitMix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
