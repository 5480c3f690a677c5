//! Placement masks: which integers of `[n]` are still unplaced.
//!
//! Bit `j` (1-based) set means `j` has not been placed yet. Internally bit `j`
//! lives at bit position `j - 1` of a `u128`, which caps `n` at 127.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest supported ground-set size.
pub const MAX_N: usize = 127;

pub(crate) fn check_n(n: usize) -> Result<()> {
    if (1..=MAX_N).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidSize(n))
    }
}

#[inline]
pub(crate) fn full_bits(n: usize) -> u128 {
    debug_assert!(n <= MAX_N);
    (1u128 << n) - 1
}

/// Maps bit position `i` to `2 * centre - i`, dropping anything that lands
/// outside `0..128`.
#[inline]
fn mirror_about(bits: u128, centre: u32) -> u128 {
    let r = bits.reverse_bits();
    let shift = 2 * centre as i32 - 127;
    if shift >= 0 {
        r << shift
    } else {
        r >> (-shift)
    }
}

/// Legal next placements for the unplaced set `unplaced` of `[n]`, as a bitset
/// in the same layout.
///
/// `j` is legal iff no placed `i` and unplaced `k` satisfy `i + k = 2j`. The
/// pair `k = j` needs no special case: it would force `i = j`, which cannot be
/// both placed and unplaced. Reflecting the placed set about `j` turns the
/// search over `i` into one AND against the unplaced set.
#[inline]
pub(crate) fn allowed_bits(n: usize, unplaced: u128) -> u128 {
    let placed = full_bits(n) & !unplaced;
    if placed == 0 {
        return unplaced;
    }
    let mut allowed = 0u128;
    let mut rest = unplaced;
    while rest != 0 {
        let j = rest.trailing_zeros();
        rest &= rest - 1;
        if mirror_about(placed, j) & unplaced == 0 {
            allowed |= 1u128 << j;
        }
    }
    allowed
}

#[inline]
pub(crate) fn reflect_bits(n: usize, bits: u128) -> u128 {
    bits.reverse_bits() >> (128 - n)
}

pub(crate) fn bit_positions(mut bits: u128) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if bits == 0 {
            None
        } else {
            let j = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            Some(j + 1)
        }
    })
}

/// An `n`-bit placement state; bit `j` = 1 means `j` is not yet placed.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct PlacementMask {
    n: u8,
    bits: u128,
}

impl PlacementMask {
    /// Nothing placed yet.
    pub fn full(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(PlacementMask {
            n: n as u8,
            bits: full_bits(n),
        })
    }

    /// Everything placed.
    pub fn empty(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(PlacementMask {
            n: n as u8,
            bits: 0,
        })
    }

    /// Builds a mask from its key encoding (bit `j - 1` for integer `j`).
    pub fn from_bits(n: usize, bits: u128) -> Result<Self> {
        check_n(n)?;
        if bits & !full_bits(n) != 0 {
            return Err(Error::InvalidMask(format!("{bits:#x} has bits above {n}")));
        }
        Ok(PlacementMask { n: n as u8, bits })
    }

    pub(crate) fn from_bits_unchecked(n: usize, bits: u128) -> Self {
        debug_assert!(check_n(n).is_ok() && bits & !full_bits(n) == 0);
        PlacementMask { n: n as u8, bits }
    }

    pub fn n(&self) -> usize {
        usize::from(self.n)
    }

    /// Fixed-width key: bit `j - 1` set iff `j` is unplaced.
    pub fn bits(&self) -> u128 {
        self.bits
    }

    /// Number of unplaced integers.
    pub fn popcount(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_unplaced(&self, j: usize) -> bool {
        (1..=self.n()).contains(&j) && self.bits >> (j - 1) & 1 == 1
    }

    /// Returns the mask with `j` marked as placed. Panics if `j` is out of range.
    pub fn place(&self, j: usize) -> Self {
        assert!((1..=self.n()).contains(&j), "{j} outside 1..={}", self.n);
        PlacementMask {
            n: self.n,
            bits: self.bits & !(1u128 << (j - 1)),
        }
    }

    pub fn unplaced(&self) -> impl Iterator<Item = usize> {
        bit_positions(self.bits)
    }

    pub fn placed(&self) -> impl Iterator<Item = usize> {
        bit_positions(full_bits(self.n()) & !self.bits)
    }

    /// Every unplaced `j` that may be placed next without creating a placed
    /// `i`, unplaced `k` pair with `i + k = 2j`. Ascending order.
    pub fn allowed_placements(&self) -> Vec<usize> {
        bit_positions(allowed_bits(self.n(), self.bits)).collect()
    }

    /// Same set as [`allowed_placements`](Self::allowed_placements), computed
    /// by scanning offsets `d = 1..=min(j-1, n-j)` for each candidate.
    pub fn allowed_placements_by_offsets(&self) -> Vec<usize> {
        let n = self.n();
        let unplaced = |x: usize| self.bits >> (x - 1) & 1 == 1;
        (1..=n)
            .filter(|&j| unplaced(j))
            .filter(|&j| {
                (1..=(j - 1).min(n - j)).all(|d| {
                    let (lo, hi) = (j - d, j + d);
                    unplaced(lo) == unplaced(hi)
                })
            })
            .collect()
    }

    /// Bit reversal: bit `j` moves to bit `n + 1 - j`.
    pub fn reflect(&self) -> Self {
        PlacementMask {
            n: self.n,
            bits: reflect_bits(self.n(), self.bits),
        }
    }

    /// The smaller of this mask's key and its reflection's key.
    pub fn canonical_key(&self) -> u128 {
        self.bits.min(reflect_bits(self.n(), self.bits))
    }
}

impl fmt::Display for PlacementMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = (1..=self.n())
            .map(|j| if self.is_unplaced(j) { '1' } else { '0' })
            .collect();
        f.write_str(&s)
    }
}

impl FromStr for PlacementMask {
    type Err = Error;

    /// Parses `'0'`/`'1'` characters with position 1 leftmost.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s.len() > MAX_N || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(Error::InvalidMask(s.to_string()));
        }
        let bits = s
            .bytes()
            .enumerate()
            .filter(|&(_, b)| b == b'1')
            .fold(0u128, |acc, (i, _)| acc | 1u128 << i);
        PlacementMask::from_bits(s.len(), bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn mask(s: &str) -> PlacementMask {
        s.parse().unwrap()
    }

    /// Literal form of the legality test: for every candidate `j`, scan all
    /// `(i, k)` pairs of `[n]`.
    fn allowed_by_pairs(m: &PlacementMask) -> Vec<usize> {
        let n = m.n();
        (1..=n)
            .filter(|&j| m.is_unplaced(j))
            .filter(|&j| {
                !(1..=n).any(|i| {
                    (1..=n).any(|k| !m.is_unplaced(i) && m.is_unplaced(k) && i + k == 2 * j)
                })
            })
            .collect()
    }

    #[test]
    fn nothing_placed_allows_everything() {
        assert_eq!(mask("11111").allowed_placements(), vec![1, 2, 3, 4, 5]);
        assert_eq!(mask("1").allowed_placements(), vec![1]);
    }

    #[test]
    fn after_placing_one() {
        let m = PlacementMask::full(5).unwrap().place(1);
        assert_eq!(m.to_string(), "01111");
        assert_eq!(allowed_by_pairs(&m), vec![4, 5]);
        assert_eq!(m.allowed_placements(), vec![4, 5]);
        assert_eq!(m.allowed_placements_by_offsets(), vec![4, 5]);
    }

    #[test]
    fn reflect_reverses_bits() {
        assert_eq!(mask("1010").reflect().to_string(), "0101");
        assert_eq!(mask("1100100").reflect(), mask("0010011"));
    }

    #[test]
    fn string_round_trip_and_rejects() {
        assert_eq!(mask("01101").to_string(), "01101");
        assert!("".parse::<PlacementMask>().is_err());
        assert!("0120".parse::<PlacementMask>().is_err());
        assert!("1".repeat(128).parse::<PlacementMask>().is_err());
        assert!("1".repeat(127).parse::<PlacementMask>().is_ok());
    }

    #[test]
    fn size_cap() {
        assert!(PlacementMask::full(0).is_err());
        assert!(PlacementMask::full(128).is_err());
        let m = PlacementMask::full(127).unwrap();
        assert_eq!(m.popcount(), 127);
        assert_eq!(m.reflect(), m);
        assert!(PlacementMask::from_bits(3, 0b1000).is_err());
    }

    #[test]
    fn wide_masks_match_pair_scan() {
        // Exercise the shift direction change around the middle of the word.
        for n in [63, 64, 65, 100, 127] {
            let mut m = PlacementMask::full(n).unwrap();
            for j in [1, n / 3, n / 2 + 1, n] {
                m = m.place(j);
                assert_eq!(m.allowed_placements(), allowed_by_pairs(&m), "n={n} m={m}");
            }
        }
    }

    #[test]
    fn every_mask_up_to_twelve_bits_is_reflection_symmetric() {
        for n in 1..=12 {
            for bits in 0..(1u128 << n) {
                let m = PlacementMask::from_bits(n, bits).unwrap();
                let a = m.allowed_placements();
                let mut b: Vec<usize> = m
                    .reflect()
                    .allowed_placements()
                    .iter()
                    .map(|j| n + 1 - j)
                    .collect();
                b.sort_unstable();
                assert_eq!(a, b, "n={n} m={m}");
            }
        }
    }

    proptest! {
        #[test]
        fn three_formulations_agree(n in 1usize..=40, raw in any::<u128>()) {
            let m = PlacementMask::from_bits(n, raw & full_bits(n)).unwrap();
            let fast = m.allowed_placements();
            prop_assert_eq!(&fast, &m.allowed_placements_by_offsets());
            prop_assert_eq!(&fast, &allowed_by_pairs(&m));
        }

        #[test]
        fn reflect_is_an_involution(n in 1usize..=127, raw in any::<u128>()) {
            let m = PlacementMask::from_bits(n, raw & full_bits(n)).unwrap();
            prop_assert_eq!(m.reflect().reflect(), m);
            prop_assert_eq!(m.reflect().popcount(), m.popcount());
            prop_assert_eq!(m.canonical_key(), m.reflect().canonical_key());
        }
    }
}
