//! Exact non-negative counts.
//!
//! Values that fit in a `u128` stay on the fixed-width path; any addition or
//! multiplication that would overflow is detected and promoted to a
//! [`BigUint`]. A promoted value never demotes, but the representation is kept
//! canonical (`Big` only above `u128::MAX`) so equality and ordering can be
//! derived structurally after a cheap variant check.

use std::cmp::Ordering;
use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Mul};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

use crate::error::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Small(u128),
    Big(BigUint),
}

/// An exact, arbitrary-precision non-negative integer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BigCount(Repr);

impl BigCount {
    pub const ZERO: BigCount = BigCount(Repr::Small(0));
    pub const ONE: BigCount = BigCount(Repr::Small(1));

    fn from_big(value: BigUint) -> Self {
        match value.to_u128() {
            Some(v) => BigCount(Repr::Small(v)),
            None => BigCount(Repr::Big(value)),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0))
    }

    /// True once the value no longer fits the fixed-width path.
    pub fn is_promoted(&self) -> bool {
        matches!(self.0, Repr::Big(_))
    }

    pub fn to_u128(&self) -> Option<u128> {
        match self.0 {
            Repr::Small(v) => Some(v),
            Repr::Big(_) => None,
        }
    }

    pub fn to_biguint(&self) -> BigUint {
        match &self.0 {
            Repr::Small(v) => BigUint::from(*v),
            Repr::Big(b) => b.clone(),
        }
    }

    pub fn bits(&self) -> u64 {
        match &self.0 {
            Repr::Small(v) => u64::from(128 - v.leading_zeros()),
            Repr::Big(b) => b.bits(),
        }
    }

    /// Minimal big-endian magnitude; zero encodes as the empty slice.
    pub fn to_be_bytes(&self) -> Vec<u8> {
        match &self.0 {
            Repr::Small(0) => Vec::new(),
            Repr::Small(v) => {
                let bytes = v.to_be_bytes();
                let skip = (v.leading_zeros() / 8) as usize;
                bytes[skip..].to_vec()
            }
            Repr::Big(b) => b.to_bytes_be(),
        }
    }

    pub fn from_be_bytes(bytes: &[u8]) -> Self {
        let first = bytes.iter().position(|&b| b != 0).unwrap_or(bytes.len());
        let bytes = &bytes[first..];
        if bytes.len() <= 16 {
            let mut buf = [0u8; 16];
            buf[16 - bytes.len()..].copy_from_slice(bytes);
            BigCount(Repr::Small(u128::from_be_bytes(buf)))
        } else {
            BigCount(Repr::Big(BigUint::from_bytes_be(bytes)))
        }
    }

    pub fn num_digits(&self) -> usize {
        self.to_string().len()
    }
}

impl Default for BigCount {
    fn default() -> Self {
        BigCount::ZERO
    }
}

impl From<u64> for BigCount {
    fn from(v: u64) -> Self {
        BigCount(Repr::Small(u128::from(v)))
    }
}

impl From<u128> for BigCount {
    fn from(v: u128) -> Self {
        BigCount(Repr::Small(v))
    }
}

impl From<BigUint> for BigCount {
    fn from(v: BigUint) -> Self {
        BigCount::from_big(v)
    }
}

impl From<&BigCount> for BigUint {
    fn from(v: &BigCount) -> Self {
        v.to_biguint()
    }
}

impl Ord for BigCount {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a), Repr::Small(b)) => a.cmp(b),
            (Repr::Small(_), Repr::Big(_)) => Ordering::Less,
            (Repr::Big(_), Repr::Small(_)) => Ordering::Greater,
            (Repr::Big(a), Repr::Big(b)) => a.cmp(b),
        }
    }
}

impl PartialOrd for BigCount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl AddAssign<&BigCount> for BigCount {
    fn add_assign(&mut self, rhs: &BigCount) {
        match (&mut self.0, &rhs.0) {
            (Repr::Small(a), Repr::Small(b)) => match a.checked_add(*b) {
                Some(s) => *a = s,
                None => self.0 = Repr::Big(BigUint::from(*a) + *b),
            },
            (Repr::Small(a), Repr::Big(b)) => self.0 = Repr::Big(b + *a),
            (Repr::Big(a), Repr::Small(b)) => *a += *b,
            (Repr::Big(a), Repr::Big(b)) => *a += b,
        }
    }
}

impl AddAssign for BigCount {
    fn add_assign(&mut self, rhs: BigCount) {
        *self += &rhs;
    }
}

impl Add for BigCount {
    type Output = BigCount;

    fn add(mut self, rhs: BigCount) -> BigCount {
        self += &rhs;
        self
    }
}

impl<'a> Add<&'a BigCount> for &'a BigCount {
    type Output = BigCount;

    fn add(self, rhs: &BigCount) -> BigCount {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Mul for &BigCount {
    type Output = BigCount;

    fn mul(self, rhs: &BigCount) -> BigCount {
        if let (Repr::Small(a), Repr::Small(b)) = (&self.0, &rhs.0) {
            if let Some(p) = a.checked_mul(*b) {
                return BigCount(Repr::Small(p));
            }
        }
        BigCount::from_big(self.to_biguint() * rhs.to_biguint())
    }
}

impl Mul for BigCount {
    type Output = BigCount;

    fn mul(self, rhs: BigCount) -> BigCount {
        &self * &rhs
    }
}

impl Sum for BigCount {
    fn sum<I: Iterator<Item = BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::ZERO, |mut acc, x| {
            acc += &x;
            acc
        })
    }
}

impl<'a> Sum<&'a BigCount> for BigCount {
    fn sum<I: Iterator<Item = &'a BigCount>>(iter: I) -> Self {
        iter.fold(BigCount::ZERO, |mut acc, x| {
            acc += x;
            acc
        })
    }
}

impl fmt::Display for BigCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(v) => fmt::Display::fmt(v, f),
            Repr::Big(b) => fmt::Display::fmt(b, f),
        }
    }
}

impl FromStr for BigCount {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse_err = |reason: &str| Error::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(parse_err("expected decimal digits"));
        }
        match s.parse::<u128>() {
            Ok(v) => Ok(BigCount(Repr::Small(v))),
            Err(_) => BigUint::from_str(s)
                .map(BigCount::from_big)
                .map_err(|e| parse_err(&e.to_string())),
        }
    }
}

impl Zero for BigCount {
    fn zero() -> Self {
        BigCount::ZERO
    }

    fn is_zero(&self) -> bool {
        BigCount::is_zero(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn overflow_promotes_instead_of_wrapping() {
        let mut a = BigCount::from(u128::MAX);
        assert!(!a.is_promoted());
        a += &BigCount::ONE;
        assert!(a.is_promoted());
        assert_eq!(a.to_string(), "340282366920938463463374607431768211456");
        assert!(a > BigCount::from(u128::MAX));
    }

    #[test]
    fn multiplication_promotes() {
        let a = BigCount::from(u128::MAX);
        let p = &a * &BigCount::from(3u64);
        assert_eq!(p.to_biguint(), BigUint::from(u128::MAX) * 3u32);
    }

    #[test]
    fn big_results_that_fit_stay_canonical() {
        let big: BigCount = "340282366920938463463374607431768211456".parse().unwrap();
        let back = BigCount::from(big.to_biguint() - 1u32);
        assert!(!back.is_promoted());
        assert_eq!(back, BigCount::from(u128::MAX));
    }

    #[test]
    fn zero_encodes_empty() {
        assert!(BigCount::ZERO.to_be_bytes().is_empty());
        assert_eq!(BigCount::from_be_bytes(&[]), BigCount::ZERO);
        assert_eq!(BigCount::from(258u64).to_be_bytes(), vec![1, 2]);
    }

    #[test]
    fn rejects_non_decimal() {
        assert!("".parse::<BigCount>().is_err());
        assert!("-3".parse::<BigCount>().is_err());
        assert!("12a".parse::<BigCount>().is_err());
    }

    proptest! {
        #[test]
        fn arithmetic_matches_biguint(a in any::<u128>(), b in any::<u128>(), c in any::<u64>()) {
            let (ca, cb, cc) = (BigCount::from(a), BigCount::from(b), BigCount::from(c));
            let sum = &ca + &cb;
            prop_assert_eq!(sum.to_biguint(), BigUint::from(a) + b);
            let prod = &sum * &cc;
            prop_assert_eq!(prod.to_biguint(), (BigUint::from(a) + b) * c);
            prop_assert_eq!(BigCount::from_be_bytes(&prod.to_be_bytes()), prod.clone());
            prop_assert_eq!(prod.to_string().parse::<BigCount>().unwrap(), prod.clone());
            prop_assert_eq!(sum.cmp(&prod), sum.to_biguint().cmp(&prod.to_biguint()));
        }
    }
}
