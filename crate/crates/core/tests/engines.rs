use std::fs;

use threefree::analysis::ground_truth;
use threefree::counter::{count_memoized_with, visited_state_counts};
use threefree::{
    count_by_enumeration, count_layered, count_memoized, enumerate, is_three_free_definitional,
    validate_prefix, BigCount, EnumerationTask, LayeredOptions, MemoryCap, Permutation,
};

#[test]
fn engines_match_the_table_up_to_30() {
    for n in 1..=30 {
        let expected = ground_truth(n).unwrap();
        let (memo, memo_stats) = count_memoized(n).unwrap();
        let (sym, _) = count_memoized_with(n, true, MemoryCap::default()).unwrap();
        let opts = LayeredOptions {
            symmetry: n % 2 == 0,
            parallelism: 1 + n % 3,
            ..Default::default()
        };
        let (layered, layered_stats) = count_layered(n, &opts).unwrap();
        assert_eq!(memo, expected, "memoized n = {n}");
        assert_eq!(sym, expected, "memoized with symmetry n = {n}");
        assert_eq!(layered, expected, "layered n = {n}");
        if !opts.symmetry {
            assert_eq!(
                memo_stats.visited_states, layered_stats.visited_states,
                "n = {n}"
            );
        }
    }
}

#[test]
fn enumeration_matches_the_table_up_to_15() {
    for n in 1..=15 {
        assert_eq!(
            count_by_enumeration(n).unwrap(),
            ground_truth(n).unwrap(),
            "n = {n}"
        );
    }
}

#[test]
fn enumerated_permutations_are_three_free_and_sorted() {
    let task = EnumerationTask::new(11, &[]).unwrap();
    let mut seen: Vec<Vec<u8>> = Vec::new();
    let emitted = enumerate(&task, |p: &Permutation| {
        assert!(is_three_free_definitional(p).unwrap());
        let seq: Vec<usize> = p.iter().collect();
        validate_prefix(&seq, 11).unwrap();
        seen.push(p.elements().to_vec());
    });
    assert_eq!(emitted, ground_truth(11).unwrap());
    assert!(seen.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn spilled_run_agrees_and_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    let opts = LayeredOptions {
        spill_dir: Some(dir.path().to_path_buf()),
        parallelism: 2,
        ..Default::default()
    };
    let (value, stats) = count_layered(22, &opts).unwrap();
    assert_eq!(value, ground_truth(22).unwrap());
    assert_eq!(stats.layer_sizes, visited_state_counts(22).unwrap());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn values_past_64_bits_are_exact() {
    let big = ground_truth(60).unwrap();
    assert!(big.to_u128().unwrap() > u64::MAX as u128);
    let product = &big * &BigCount::from(1u64 << 62);
    assert!(product.is_promoted() || product.to_u128().is_some());
    assert_eq!(product.to_biguint(), big.to_biguint() << 62);
}
