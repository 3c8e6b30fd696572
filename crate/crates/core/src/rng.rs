//! Seeded, splittable random streams.
//!
//! Every stream is a ChaCha8 generator keyed by `seed` and positioned on the
//! 64-bit ChaCha stream `stream_id`. Child streams for individual Monte Carlo
//! draws are derived with [`SeededRng::substream`], so draw `i` is the same
//! regardless of how draws are scheduled across threads.
//!
//! Standard Gaussians come from `rand_distr::StandardNormal` (ziggurat) fed
//! by that generator. Results are reproducible within this implementation
//! only.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeededRng {
    pub seed: u64,
    pub stream_id: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream_id: 0 }
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    /// Independent child stream number `index`.
    pub fn substream(&self, index: u64) -> Self {
        Self {
            seed: self.seed,
            stream_id: splitmix64(splitmix64(self.stream_id) ^ index),
        }
    }

    pub fn generator(&self) -> ChaCha8Rng {
        let mut g = ChaCha8Rng::seed_from_u64(self.seed);
        g.set_stream(self.stream_id);
        g
    }
}
