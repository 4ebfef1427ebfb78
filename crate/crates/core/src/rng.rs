//! Splittable seed streams.
//!
//! Every stochastic operation in the crate takes a `u64` seed. Independent
//! substreams (per run, per method, per budget) are derived from a master
//! seed by hashing a path of tags, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub type StreamRng = ChaCha8Rng;

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// A node in a tree of seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedStream(u64);

impl SeedStream {
    pub fn new(master: u64) -> Self {
        SeedStream(splitmix64(master))
    }

    /// Derive an independent child stream identified by `tag`.
    pub fn child(self, tag: u64) -> Self {
        SeedStream(splitmix64(self.0 ^ splitmix64(tag ^ 0x632B_E59B_D9B4_E019)))
    }

    pub fn path(self, tags: &[u64]) -> Self {
        tags.iter().fold(self, |s, &t| s.child(t))
    }

    pub fn seed(self) -> u64 {
        self.0
    }

    pub fn rng(self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}
