//! Seeded substreams and the parallel/sequential execution switch.
//!
//! Every independent unit of work (a path, a latent index within a sweep, a
//! replicate) draws from its own generator keyed by `(root seed, lane, index)`,
//! so results do not depend on scheduling or on whether rayon is enabled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Generator for the sequential part of a computation.
pub fn root_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Deterministic generator for unit `index` of lane `lane` under `seed`.
pub fn substream(seed: u64, lane: u64, index: u64) -> Rng {
    let mut key = [0u8; 32];
    let words = [
        splitmix64(seed),
        splitmix64(seed ^ lane.rotate_left(17) ^ 0x243f_6a88_85a3_08d3),
        splitmix64(index ^ 0x1319_8a2e_0370_7344),
        splitmix64(lane.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ index.rotate_left(29)),
    ];
    for (chunk, w) in key.chunks_exact_mut(8).zip(words) {
        chunk.copy_from_slice(&w.to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Lanes keep substreams of different subsystems disjoint.
pub(crate) mod lane {
    pub const LATENT: u64 = 1 << 40;
    pub const FITTED: u64 = 2 << 40;
    pub const FORECAST: u64 = 3 << 40;
}

/// How data-parallel loops are executed.
///
/// `Parallel` only fans out when the crate is built with the `parallel`
/// feature; otherwise it runs sequentially. Both produce identical output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Minimum items per rayon task for the per-index loops.
#[cfg(feature = "parallel")]
const MIN_CHUNK: usize = 256;

impl Execution {
    /// `(0..n).map(f).collect()`, possibly in parallel.
    pub fn map_range<T, F>(self, n: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                (0..n)
                    .into_par_iter()
                    .with_min_len(MIN_CHUNK.min(n.max(1)))
                    .map(f)
                    .collect()
            }
            _ => (0..n).map(f).collect(),
        }
    }

    /// Overwrites `out[i] = f(i)` for every slot.
    pub fn fill_indexed<T, F>(self, out: &mut [T], f: F)
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => {
                use rayon::prelude::*;
                out.par_iter_mut()
                    .with_min_len(MIN_CHUNK)
                    .enumerate()
                    .for_each(|(i, slot)| *slot = f(i));
            }
            _ => out
                .iter_mut()
                .enumerate()
                .for_each(|(i, slot)| *slot = f(i)),
        }
    }
}
