//! Counter-based seeding.
//!
//! Every random quantity in a run is drawn from a ChaCha8 stream addressed by
//! a `(master_seed, stream_id)` pair. Draw `i` of an ABC run always uses
//! stream `i`, so the output does not depend on how work is scheduled across
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The generator type handed to every sampler and simulator.
pub type StreamRng = ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub stream_id: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64, stream_id: u64) -> Self {
        Self {
            master_seed,
            stream_id,
        }
    }

    /// Opens the stream.
    pub fn rng(&self) -> StreamRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.stream_id);
        rng
    }

    /// Same master seed, different stream.
    pub const fn with_stream(&self, stream_id: u64) -> Self {
        Self {
            master_seed: self.master_seed,
            stream_id,
        }
    }

    /// A child seed space keyed by `tag`. Children of distinct tags, and the
    /// parent itself, address disjoint key material.
    pub fn derive(&self, tag: u64) -> Self {
        let key = splitmix64(splitmix64(self.master_seed ^ 0x243f_6a88_85a3_08d3) ^ self.stream_id);
        Self {
            master_seed: splitmix64(key ^ tag.rotate_left(17)),
            stream_id: tag,
        }
    }
}

/// One step of the SplitMix64 output function.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
