//! Backtracking enumeration of 3-free permutations.
//!
//! Each level tries the legal placements in ascending order, so permutations
//! come out in lexicographic order. The search recurses once per placed
//! element; depth is bounded by `n <= 127`, so native recursion is used.

use rayon::prelude::*;

use crate::count::BigCount;
use crate::error::Result;
use crate::mask::{allowed_bits, bit_positions, PlacementMask};
use crate::permutation::{validate_prefix, Permutation};

/// What to enumerate: all 3-free permutations of `[n]` starting with `prefix`.
#[derive(Clone, Debug)]
pub struct EnumerationTask {
    prefix: Permutation,
    mask: PlacementMask,
    emit_limit: Option<u64>,
}

impl EnumerationTask {
    pub fn new(n: usize, prefix: &[usize]) -> Result<Self> {
        let mask = validate_prefix(prefix, n)?;
        Ok(EnumerationTask {
            prefix: Permutation::new(n, prefix.iter().copied())?,
            mask,
            emit_limit: None,
        })
    }

    /// Stop after `limit` permutations have been emitted.
    pub fn with_limit(mut self, limit: u64) -> Self {
        self.emit_limit = Some(limit);
        self
    }

    pub fn n(&self) -> usize {
        self.mask.n()
    }

    pub fn prefix(&self) -> &Permutation {
        &self.prefix
    }

    pub fn emit_limit(&self) -> Option<u64> {
        self.emit_limit
    }

    /// One sub-task per legal next element, in ascending order. A complete
    /// prefix has no children.
    pub fn split(&self) -> Vec<EnumerationTask> {
        bit_positions(allowed_bits(self.n(), self.mask.bits()))
            .map(|j| {
                let mut prefix = self.prefix.clone();
                prefix.push_unchecked(j);
                EnumerationTask {
                    prefix,
                    mask: self.mask.place(j),
                    emit_limit: self.emit_limit,
                }
            })
            .collect()
    }
}

struct Walk<'s, F> {
    n: usize,
    sink: &'s mut F,
    emitted: u64,
    limit: u64,
}

impl<F: FnMut(&Permutation)> Walk<'_, F> {
    /// Returns false once the limit is reached.
    fn descend(&mut self, unplaced: u128, current: &mut Permutation) -> bool {
        if unplaced == 0 {
            (self.sink)(current);
            self.emitted += 1;
            return self.emitted < self.limit;
        }
        for j in bit_positions(allowed_bits(self.n, unplaced)) {
            current.push_unchecked(j);
            let go_on = self.descend(unplaced & !(1u128 << (j - 1)), current);
            current.pop();
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Calls `sink` once per 3-free permutation extending the task's prefix, in
/// lexicographic order, and returns how many were emitted.
pub fn enumerate<F>(task: &EnumerationTask, mut sink: F) -> BigCount
where
    F: FnMut(&Permutation),
{
    let limit = task.emit_limit.unwrap_or(u64::MAX);
    if limit == 0 {
        return BigCount::ZERO;
    }
    let mut walk = Walk {
        n: task.n(),
        sink: &mut sink,
        emitted: 0,
        limit,
    };
    let mut current = Permutation::with_prefix_unchecked(task.n(), task.prefix.elements());
    walk.descend(task.mask.bits(), &mut current);
    BigCount::from(walk.emitted)
}

fn count_leaves(n: usize, unplaced: u128) -> u128 {
    if unplaced == 0 {
        return 1;
    }
    bit_positions(allowed_bits(n, unplaced))
        .map(|j| count_leaves(n, unplaced & !(1u128 << (j - 1))))
        .sum()
}

/// Counts the task's permutations without materialising them. Ignores the
/// emit limit.
pub fn count_task(task: &EnumerationTask) -> BigCount {
    BigCount::from(count_leaves(task.n(), task.mask.bits()))
}

/// `θ(n)` by exhaustive backtracking. Runtime grows like `θ(n)` itself;
/// beyond `n ≈ 16` use the counters in [`crate::counter`].
pub fn count_by_enumeration(n: usize) -> Result<BigCount> {
    Ok(count_task(&EnumerationTask::new(n, &[])?))
}

fn pool(threads: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .expect("failed to build thread pool")
}

/// [`count_task`] with first-level subtrees explored on `threads` workers.
pub fn count_task_parallel(task: &EnumerationTask, threads: usize) -> BigCount {
    let subtasks = task.split();
    if subtasks.is_empty() {
        return count_task(task);
    }
    pool(threads).install(|| subtasks.par_iter().map(count_task).sum())
}

/// [`enumerate`] with first-level subtrees explored concurrently. Each subtree
/// is buffered and the buffers are replayed into `sink` in prefix order, so
/// the emitted stream is identical to the sequential one.
pub fn enumerate_parallel<F>(task: &EnumerationTask, threads: usize, mut sink: F) -> BigCount
where
    F: FnMut(&Permutation),
{
    let subtasks = task.split();
    if subtasks.is_empty() {
        return enumerate(task, sink);
    }
    let buffers: Vec<Vec<Permutation>> = pool(threads).install(|| {
        subtasks
            .par_iter()
            .map(|t| {
                let mut out = Vec::new();
                enumerate(t, |p| out.push(p.clone()));
                out
            })
            .collect()
    });
    let limit = task.emit_limit.unwrap_or(u64::MAX);
    let mut emitted = 0u64;
    for p in buffers.iter().flatten() {
        if emitted == limit {
            break;
        }
        sink(p);
        emitted += 1;
    }
    BigCount::from(emitted)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::is_three_free_definitional;
    use itertools::Itertools;
    use std::collections::BTreeSet;

    fn collect(task: &EnumerationTask) -> Vec<String> {
        let mut out = Vec::new();
        enumerate(task, |p| out.push(p.to_string()));
        out
    }

    fn brute_force(n: usize) -> BTreeSet<Permutation> {
        (1..=n)
            .permutations(n)
            .map(|v| Permutation::new(n, v).unwrap())
            .filter(|p| is_three_free_definitional(p).unwrap())
            .collect()
    }

    #[test]
    fn three_in_loop_order() {
        let task = EnumerationTask::new(3, &[]).unwrap();
        assert_eq!(collect(&task), ["1,3,2", "2,1,3", "2,3,1", "3,1,2"]);
        assert_eq!(enumerate(&task, |_| {}), BigCount::from(4u64));
    }

    #[test]
    fn one() {
        let task = EnumerationTask::new(1, &[]).unwrap();
        assert_eq!(collect(&task), ["1"]);
    }

    #[test]
    fn prefix_one_of_five_matches_filter() {
        let expected = brute_force(5)
            .iter()
            .filter(|p| p.elements()[0] == 1)
            .count();
        let task = EnumerationTask::new(5, &[1]).unwrap();
        assert_eq!(enumerate(&task, |_| {}), BigCount::from(expected as u64));
        assert_eq!(count_task(&task), BigCount::from(expected as u64));
    }

    #[test]
    fn table_values() {
        for (n, v) in [(4, 10u64), (10, 1066), (14, 29380)] {
            assert_eq!(count_by_enumeration(n).unwrap(), BigCount::from(v));
        }
    }

    #[test]
    fn exhaustive_against_filter() {
        for n in 1..=8 {
            let task = EnumerationTask::new(n, &[]).unwrap();
            let mut seen = Vec::new();
            enumerate(&task, |p| seen.push(p.clone()));
            assert!(
                seen.windows(2).all(|w| w[0] < w[1]),
                "not strictly lexicographic"
            );
            let set: BTreeSet<_> = seen.into_iter().collect();
            assert_eq!(set, brute_force(n), "n={n}");
        }
    }

    #[test]
    fn emitted_sets_are_valid_distinct_and_reflection_closed() {
        for n in 9..=10 {
            let mut seen = BTreeSet::new();
            let count = enumerate(&EnumerationTask::new(n, &[]).unwrap(), |p| {
                assert!(is_three_free_definitional(p).unwrap());
                assert!(seen.insert(p.clone()));
            });
            assert_eq!(count, BigCount::from(seen.len() as u64));
            assert!(seen.iter().all(|p| seen.contains(&p.reflect())));
        }
    }

    #[test]
    fn first_element_partition() {
        for n in 1..=10 {
            let total: BigCount = (1..=n)
                .map(|f| count_task(&EnumerationTask::new(n, &[f]).unwrap()))
                .sum();
            assert_eq!(total, count_by_enumeration(n).unwrap());
        }
    }

    #[test]
    fn limit_stops_early() {
        let task = EnumerationTask::new(6, &[]).unwrap().with_limit(5);
        let all = collect(&EnumerationTask::new(6, &[]).unwrap());
        assert_eq!(collect(&task), all[..5]);
        assert_eq!(
            enumerate(&task.clone().with_limit(0), |_| panic!()),
            BigCount::ZERO
        );
        assert_eq!(
            enumerate(
                &EnumerationTask::new(3, &[]).unwrap().with_limit(99),
                |_| {}
            ),
            BigCount::from(4u64)
        );
    }

    #[test]
    fn invalid_prefix_is_rejected() {
        assert!(EnumerationTask::new(5, &[1, 2]).is_err());
        assert!(EnumerationTask::new(5, &[7]).is_err());
    }

    #[test]
    fn complete_prefix_emits_itself() {
        let task = EnumerationTask::new(3, &[2, 1, 3]).unwrap();
        assert_eq!(collect(&task), ["2,1,3"]);
        assert_eq!(enumerate_parallel(&task, 2, |_| {}), BigCount::ONE);
    }

    #[test]
    fn parallel_matches_sequential() {
        for threads in [1, 3] {
            let task = EnumerationTask::new(9, &[]).unwrap();
            let mut par = Vec::new();
            enumerate_parallel(&task, threads, |p| par.push(p.to_string()));
            assert_eq!(par, collect(&task));
            assert_eq!(count_task_parallel(&task, threads), count_task(&task));
            let limited = task.clone().with_limit(17);
            let mut lim = Vec::new();
            enumerate_parallel(&limited, threads, |p| lim.push(p.to_string()));
            assert_eq!(lim, collect(&limited));
        }
    }
}
