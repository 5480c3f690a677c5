use std::time::Instant;

use rustc_hash::FxHashMap;

use super::{layer_histogram, CountStats, MemoryCap};
use crate::count::BigCount;
use crate::error::{Error, Result};
use crate::mask::{allowed_bits, bit_positions, check_n, full_bits, reflect_bits, PlacementMask};

/// Memo from mask key to the number of legal completions of that mask.
///
/// With symmetry enabled, keys are `min(mask, reflect(mask))`.
#[derive(Debug)]
pub struct MemoTable {
    n: usize,
    symmetry: bool,
    cap: MemoryCap,
    entries: FxHashMap<u128, BigCount>,
}

impl MemoTable {
    pub fn new(n: usize) -> Result<Self> {
        MemoTable::with_options(n, false, MemoryCap::UNLIMITED)
    }

    pub fn with_options(n: usize, symmetry: bool, cap: MemoryCap) -> Result<Self> {
        check_n(n)?;
        Ok(MemoTable {
            n,
            symmetry,
            cap,
            entries: FxHashMap::default(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn symmetry_enabled(&self) -> bool {
        self.symmetry
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, mask: &PlacementMask) -> Option<&BigCount> {
        self.entries.get(&self.key(mask.bits()))
    }

    pub fn keys(&self) -> impl Iterator<Item = u128> + '_ {
        self.entries.keys().copied()
    }

    #[inline]
    fn key(&self, bits: u128) -> u128 {
        if self.symmetry {
            bits.min(reflect_bits(self.n, bits))
        } else {
            bits
        }
    }

    fn eval(&mut self, unplaced: u128) -> Result<BigCount> {
        let key = self.key(unplaced);
        if let Some(v) = self.entries.get(&key) {
            return Ok(v.clone());
        }
        let value = if unplaced == 0 {
            BigCount::ONE
        } else {
            let mut total = BigCount::ZERO;
            for j in bit_positions(allowed_bits(self.n, unplaced)) {
                total += &self.eval(unplaced & !(1u128 << (j - 1)))?;
            }
            total
        };
        if self.entries.len() as u64 >= self.cap.states() {
            return Err(Error::MemoryBudget {
                cap: self.cap.states(),
                states: self.entries.len() as u64 + 1,
                layer: Some(unplaced.count_ones() as usize),
            });
        }
        self.entries.insert(key, value.clone());
        Ok(value)
    }
}

/// Number of orderings of `mask`'s unplaced integers in which every step is a
/// legal placement. Fills `memo` with every mask reached along the way.
///
/// Panics if `memo` was built for a different `n`, or if the memo's own
/// memory cap is hit (tables from [`MemoTable::new`] are uncapped).
pub fn theta_of_mask(mask: &PlacementMask, memo: &mut MemoTable) -> BigCount {
    assert_eq!(mask.n(), memo.n, "mask and memo disagree on n");
    memo.eval(mask.bits())
        .expect("memory cap exceeded; use count_memoized_with for a fallible run")
}

/// `θ(n)` by top-down memoised recursion, no symmetry reduction, default cap.
pub fn count_memoized(n: usize) -> Result<(BigCount, CountStats)> {
    count_memoized_with(n, false, MemoryCap::default())
}

pub fn count_memoized_with(
    n: usize,
    symmetry: bool,
    cap: MemoryCap,
) -> Result<(BigCount, CountStats)> {
    let start = Instant::now();
    let mut memo = MemoTable::with_options(n, symmetry, cap)?;
    let value = memo.eval(full_bits(n))?;
    let stats = CountStats {
        visited_states: memo.len() as u64,
        peak_resident_states: memo.len() as u64,
        peak_index_states: 0,
        layer_sizes: layer_histogram(n, memo.keys()),
        elapsed: start.elapsed(),
    };
    Ok((value, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::validate_prefix;
    use itertools::Itertools;

    /// Completions of `mask` by trying every ordering of its unplaced set.
    fn brute_completions(mask: &PlacementMask) -> usize {
        let rest: Vec<usize> = mask.unplaced().collect();
        let k = rest.len();
        rest.into_iter()
            .permutations(k)
            .filter(|order| {
                let mut m = *mask;
                order.iter().all(|&j| {
                    let ok = m.allowed_placements().contains(&j);
                    m = m.place(j);
                    ok
                })
            })
            .count()
    }

    #[test]
    fn table_values() {
        assert_eq!(count_memoized(5).unwrap().0, BigCount::from(20u64));
        assert_eq!(count_memoized(20).unwrap().0, BigCount::from(2937136u64));
    }

    #[test]
    fn one_visits_two_states() {
        let (v, stats) = count_memoized(1).unwrap();
        assert_eq!(v, BigCount::ONE);
        assert_eq!(stats.visited_states, 2);
        assert_eq!(stats.layer_sizes, vec![1, 1]);
    }

    #[test]
    fn mask_values() {
        let mut memo = MemoTable::new(3).unwrap();
        assert_eq!(
            theta_of_mask(&PlacementMask::full(3).unwrap(), &mut memo),
            BigCount::from(4u64)
        );
        for n in [1, 7, 127] {
            let mut memo = MemoTable::new(n).unwrap();
            assert_eq!(
                theta_of_mask(&PlacementMask::empty(n).unwrap(), &mut memo),
                BigCount::ONE
            );
        }

        let m = validate_prefix(&[1, 4], 5).unwrap();
        let mut memo = MemoTable::new(5).unwrap();
        assert_eq!(
            theta_of_mask(&m, &mut memo),
            BigCount::from(brute_completions(&m) as u64)
        );
    }

    #[test]
    fn unreachable_masks_still_count_orderings() {
        // 1 and 3 placed with 2 unplaced is not reachable; the count is still
        // the number of legal orderings of what remains.
        let m: PlacementMask = "01011".parse().unwrap();
        let mut memo = MemoTable::new(5).unwrap();
        assert_eq!(
            theta_of_mask(&m, &mut memo),
            BigCount::from(brute_completions(&m) as u64)
        );
    }

    #[test]
    fn symmetry_changes_states_not_values() {
        for n in 1..=16 {
            let (plain, ps) = count_memoized_with(n, false, MemoryCap::UNLIMITED).unwrap();
            let (sym, ss) = count_memoized_with(n, true, MemoryCap::UNLIMITED).unwrap();
            assert_eq!(plain, sym);
            assert!(ss.visited_states <= ps.visited_states);
            assert!(ps.visited_states <= 1u64 << n);
        }
    }

    #[test]
    fn cap_is_enforced() {
        let err = count_memoized_with(12, false, MemoryCap::from_states(10)).unwrap_err();
        assert!(matches!(err, Error::MemoryBudget { cap: 10, .. }));
    }

    #[test]
    fn recurrence_at_root() {
        for n in 1..=12 {
            let full = PlacementMask::full(n).unwrap();
            let mut memo = MemoTable::new(n).unwrap();
            let root = theta_of_mask(&full, &mut memo);
            let split: BigCount = full
                .allowed_placements()
                .into_iter()
                .map(|j| theta_of_mask(&full.place(j), &mut memo))
                .sum();
            assert_eq!(root, split);
        }
    }

    #[test]
    fn reflected_masks_share_values() {
        for n in 1..=12 {
            let mut memo = MemoTable::new(n).unwrap();
            theta_of_mask(&PlacementMask::full(n).unwrap(), &mut memo);
            let keys: Vec<u128> = memo.keys().collect();
            for k in keys {
                let m = PlacementMask::from_bits(n, k).unwrap();
                let a = theta_of_mask(&m, &mut memo);
                assert_eq!(a, theta_of_mask(&m.reflect(), &mut memo), "n={n} {m}");
            }
        }
    }
}
