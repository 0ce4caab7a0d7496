//! Counter-based random streams.
//!
//! A [`RandomSource`] is a `(seed, stream)` pair. Every shot, trajectory or
//! sweep case draws from its own substream, so results do not depend on the
//! order in which parallel workers pick up work.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomSource {
    pub seed: u64,
    pub stream: u64,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    /// Generator positioned at the start of this source's stream.
    pub fn generator(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// Independent child source. Children of distinct `(seed, stream)` parents
    /// never share a stream.
    pub fn substream(&self, index: u64) -> RandomSource {
        let child_seed = self.generator().next_u64();
        RandomSource {
            seed: child_seed,
            stream: index,
        }
    }
}
