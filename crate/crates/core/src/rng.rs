//! Reproducible, splittable random streams.
//!
//! Every stochastic routine in the crate takes an explicit `&mut R: Rng`. Parallel
//! work derives one [`Stream`] per task from a master seed and a path of indices
//! (setting, replicate, chain, ...), so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator handed to stochastic operations.
pub type StreamRng = ChaCha8Rng;

/// A node in a deterministic tree of seeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Stream {
    key: u64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl Stream {
    pub fn new(master_seed: u64) -> Self {
        Stream {
            key: splitmix64(master_seed),
        }
    }

    /// Child stream; distinct indices give independent-looking keys.
    pub fn child(&self, index: u64) -> Self {
        Stream {
            key: splitmix64(self.key ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D))),
        }
    }

    /// Descend along several indices at once.
    pub fn path(&self, indices: &[u64]) -> Self {
        indices.iter().fold(*self, |s, &i| s.child(i))
    }

    pub fn rng(&self) -> StreamRng {
        let mut seed = [0u8; 32];
        let mut k = self.key;
        for chunk in seed.chunks_exact_mut(8) {
            k = splitmix64(k);
            chunk.copy_from_slice(&k.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }
}

/// Convenience: a generator for a master seed with no further splitting.
pub fn seeded(master_seed: u64) -> StreamRng {
    Stream::new(master_seed).rng()
}
