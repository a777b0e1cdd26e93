//! Hierarchical seed derivation.
//!
//! Every random stream in the crate is obtained from a [`SeedSpec`] by
//! naming a purpose and an index: `master -> ("split", 3) -> ...`. The
//! derivation is a pure function, so work can be scheduled in any order
//! (or on any number of threads) and still consume the same streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The RNG used for every sampling stream.
pub type StreamRng = ChaCha8Rng;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a(mut state: u64, bytes: &[u8]) -> u64 {
    for b in bytes {
        state ^= u64::from(*b);
        state = state.wrapping_mul(FNV_PRIME);
    }
    state
}

/// SplitMix64 finalizer; spreads FNV output over all 64 bits.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
}

impl SeedSpec {
    pub const fn new(master_seed: u64) -> Self {
        SeedSpec { master_seed }
    }

    /// Child seed for `purpose` in context `index`.
    pub fn derive(&self, purpose: &str, index: u64) -> SeedSpec {
        let mut h = fnv1a(FNV_OFFSET, &self.master_seed.to_le_bytes());
        h = fnv1a(h, purpose.as_bytes());
        // separator so ("ab", 1) and ("a", ...) never share a prefix
        h = fnv1a(h, &[0xff]);
        h = fnv1a(h, &index.to_le_bytes());
        SeedSpec::new(mix64(h))
    }

    pub fn rng(&self) -> StreamRng {
        StreamRng::seed_from_u64(self.master_seed)
    }
}

impl From<u64> for SeedSpec {
    fn from(v: u64) -> Self {
        SeedSpec::new(v)
    }
}

/// Whether independent work items may run on the rayon pool.
///
/// Results never depend on this choice; it exists so callers can force
/// single-threaded execution and check that claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

impl Execution {
    /// Map `f` over `0..count`, preserving index order in the output.
    pub fn map_indices<T, F>(self, count: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        use rayon::prelude::*;
        match self {
            Execution::Sequential => (0..count).map(f).collect(),
            Execution::Parallel => (0..count).into_par_iter().map(f).collect(),
        }
    }
}
