//! Enumeration and exact counting of 3-free permutations: permutations of
//! `[n] = {1, ..., n}` with no positions `i < j < k` such that
//! `a_i + a_k = 2 a_j`. `θ(n)` is their number (OEIS A003407).
//!
//! * [`permutation`] and [`mask`]: the predicate, prefix validation and the
//!   placement-legality test shared by every algorithm.
//! * [`enumerate`]: backtracking enumeration in lexicographic order.
//! * [`counter`]: memoized and layered dynamic-programming counters.
//! * [`analysis`]: the published table of `θ(1..=90)`, bound constants and
//!   exact-arithmetic checks of the known inequalities.

pub mod analysis;
pub mod count;
pub mod counter;
pub mod enumerate;
pub mod error;
pub mod mask;
pub mod permutation;

pub use count::BigCount;
pub use counter::{count_layered, count_memoized, CountStats, Engine, LayeredOptions, MemoryCap};
pub use enumerate::{count_by_enumeration, enumerate, EnumerationTask};
pub use error::{Error, Result};
pub use mask::{PlacementMask, MAX_N};
pub use permutation::{
    is_three_free_definitional, is_three_free_suffix, validate_prefix, Permutation,
};
