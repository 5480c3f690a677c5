//! Exact computation of `θ(n)` by dynamic programming over placement masks.
//!
//! Two engines share the same recurrence: `θ(b)` is 1 for the all-placed mask
//! and otherwise the sum of `θ(b - j)` over the legal placements `j` of `b`.
//!
//! * [`count_memoized`] recurses top-down from the all-unplaced mask with a
//!   hash-map memo.
//! * [`count_layered`] first expands the reachable masks layer by layer
//!   (layer = popcount), then accumulates values bottom-up holding two value
//!   layers at a time, optionally spilling key layers and checkpointing value
//!   layers to disk.

use std::time::Duration;

use serde::Serialize;

mod layered;
mod memo;
mod store;

pub use layered::{count_layered, resume_layered, visited_state_counts, LayeredOptions};
pub use memo::{count_memoized, count_memoized_with, theta_of_mask, MemoTable};
pub use store::{checkpoint, resume, LayerStore, CHECKPOINT_VERSION};

use crate::count::BigCount;
use crate::error::Result;

/// Rough resident cost of one memoised state (key, value, map overhead).
pub const BYTES_PER_STATE: u64 = 64;

/// Upper bound on resident states, derived from a byte budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MemoryCap {
    states: u64,
}

impl MemoryCap {
    pub const UNLIMITED: MemoryCap = MemoryCap { states: u64::MAX };

    pub fn from_bytes(bytes: u64) -> Self {
        MemoryCap {
            states: (bytes / BYTES_PER_STATE).max(1),
        }
    }

    pub fn from_states(states: u64) -> Self {
        MemoryCap { states }
    }

    pub fn states(&self) -> u64 {
        self.states
    }
}

impl Default for MemoryCap {
    /// 4 GiB.
    fn default() -> Self {
        MemoryCap::from_bytes(4 << 30)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct CountStats {
    /// Distinct masks evaluated, including the all-unplaced and all-placed masks.
    /// Counts canonical classes when symmetry reduction is on.
    pub visited_states: u64,
    /// Most value-bearing states held in memory at once.
    pub peak_resident_states: u64,
    /// Most mask keys held in memory at once by the layered engine's
    /// reachability pass and index. Zero for the memoized engine.
    pub peak_index_states: u64,
    /// States per popcount layer, index = number of unplaced integers.
    pub layer_sizes: Vec<u64>,
    #[serde(skip)]
    pub elapsed: Duration,
}

/// Which DP engine to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Engine {
    Memoized,
    Layered,
}

impl Engine {
    /// Memoized up to `n = 30`, layered above.
    pub fn default_for(n: usize) -> Self {
        if n <= 30 {
            Engine::Memoized
        } else {
            Engine::Layered
        }
    }
}

/// Runs `engine`. The memoized engine honours only `symmetry` and `memory_cap`.
pub fn count(n: usize, engine: Engine, opts: &LayeredOptions) -> Result<(BigCount, CountStats)> {
    match engine {
        Engine::Memoized => count_memoized_with(n, opts.symmetry, opts.memory_cap),
        Engine::Layered => count_layered(n, opts),
    }
}

pub(crate) fn layer_histogram(n: usize, keys: impl Iterator<Item = u128>) -> Vec<u64> {
    let mut sizes = vec![0u64; n + 1];
    for k in keys {
        sizes[k.count_ones() as usize] += 1;
    }
    sizes
}
