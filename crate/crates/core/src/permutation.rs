//! Permutations of `[n]` and the 3-free predicate.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mask::{allowed_bits, check_n, PlacementMask};

/// A sequence of distinct integers from `[n]`, possibly partial.
#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub struct Permutation {
    n: u8,
    elements: Vec<u8>,
}

impl Permutation {
    /// Checks distinctness, range and length; says nothing about 3-freeness.
    pub fn new<I>(n: usize, elements: I) -> Result<Self>
    where
        I: IntoIterator<Item = usize>,
    {
        check_n(n)?;
        let mut seen = 0u128;
        let mut out = Vec::with_capacity(n);
        for (idx, value) in elements.into_iter().enumerate() {
            let position = idx + 1;
            if !(1..=n).contains(&value) {
                return Err(Error::OutOfRange { position, value, n });
            }
            let bit = 1u128 << (value - 1);
            if seen & bit != 0 {
                return Err(Error::Duplicate { position, value });
            }
            seen |= bit;
            out.push(value as u8);
        }
        Ok(Permutation {
            n: n as u8,
            elements: out,
        })
    }

    pub fn empty(n: usize) -> Result<Self> {
        Permutation::new(n, [])
    }

    pub(crate) fn with_prefix_unchecked(n: usize, prefix: &[u8]) -> Self {
        let mut elements = Vec::with_capacity(n);
        elements.extend_from_slice(prefix);
        Permutation {
            n: n as u8,
            elements,
        }
    }

    pub(crate) fn push_unchecked(&mut self, value: usize) {
        self.elements.push(value as u8);
    }

    pub(crate) fn pop(&mut self) {
        self.elements.pop();
    }

    pub fn n(&self) -> usize {
        usize::from(self.n)
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.elements.len() == self.n()
    }

    pub fn elements(&self) -> &[u8] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.elements.iter().map(|&e| usize::from(e))
    }

    /// Maps each element `e` to `n + 1 - e`, keeping positions.
    pub fn reflect(&self) -> Self {
        Permutation {
            n: self.n,
            elements: self.elements.iter().map(|&e| self.n + 1 - e).collect(),
        }
    }

    /// Unplaced set after this sequence has been placed.
    pub fn mask(&self) -> PlacementMask {
        let bits = self
            .elements
            .iter()
            .fold(crate::mask::full_bits(self.n()), |acc, &e| {
                acc & !(1u128 << (e - 1))
            });
        PlacementMask::from_bits_unchecked(self.n(), bits)
    }

    fn require_complete(&self) -> Result<()> {
        if self.is_complete() {
            Ok(())
        } else {
            Err(Error::Incomplete {
                len: self.len(),
                n: self.n(),
            })
        }
    }
}

impl fmt::Display for Permutation {
    /// Comma-separated 1-based values, e.g. `1,3,2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

/// Parses a comma-separated list of integers (no ground-set size attached).
pub fn parse_sequence(s: &str) -> Result<Vec<usize>> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|tok| {
            tok.trim().parse::<usize>().map_err(|e| Error::Parse {
                input: s.to_string(),
                reason: format!("{tok:?}: {e}"),
            })
        })
        .collect()
}

impl FromStr for Permutation {
    type Err = Error;

    /// Parses a complete permutation; `n` is taken to be its length.
    fn from_str(s: &str) -> Result<Self> {
        let seq = parse_sequence(s)?;
        Permutation::new(seq.len(), seq)
    }
}

/// Reference predicate: no positions `i < j < k` with `a_i + a_k = 2 a_j`.
/// Cubic in `n`.
pub fn is_three_free_definitional(p: &Permutation) -> Result<bool> {
    p.require_complete()?;
    let a = p.elements();
    let n = a.len();
    for j in 1..n {
        let twice = 2 * u16::from(a[j]);
        for i in 0..j {
            for k in j + 1..n {
                if u16::from(a[i]) + u16::from(a[k]) == twice {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Suffix-set predicate: at each position `j`, `a_j` must be a legal placement
/// given the values still unplaced (the set `T_j`, which includes `a_j`).
pub fn is_three_free_suffix(p: &Permutation) -> Result<bool> {
    p.require_complete()?;
    let n = p.n();
    let mut unplaced = crate::mask::full_bits(n);
    for e in p.iter() {
        let bit = 1u128 << (e - 1);
        if allowed_bits(n, unplaced) & bit == 0 {
            return Ok(false);
        }
        unplaced &= !bit;
    }
    Ok(true)
}

/// Replays `seq` as a sequence of placements from the full mask, returning the
/// resulting mask, or the first element (1-based position) that is out of
/// range, repeated, or not a legal placement.
pub fn validate_prefix(seq: &[usize], n: usize) -> Result<PlacementMask> {
    let perm = Permutation::new(n, seq.iter().copied())?;
    let mut unplaced = crate::mask::full_bits(n);
    for (idx, e) in perm.iter().enumerate() {
        let bit = 1u128 << (e - 1);
        if allowed_bits(n, unplaced) & bit == 0 {
            return Err(Error::NotThreeFree {
                position: idx + 1,
                value: e,
            });
        }
        unplaced &= !bit;
    }
    Ok(PlacementMask::from_bits_unchecked(n, unplaced))
}
