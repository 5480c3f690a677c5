//! Growth constants of the form `c = (A θ(m))^(1/m)`, to 40 decimal places.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use super::table::GroundTruthTable;
use crate::error::Error;

/// Digits kept after the decimal point.
pub const FRACTION_DIGITS: u32 = 40;

/// A non-negative decimal truncated to a fixed number of fraction digits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    scaled: BigUint,
    fraction_digits: u32,
}

impl Decimal {
    /// `floor(radicand^(1/root) * 10^fraction_digits) / 10^fraction_digits`.
    pub fn root(radicand: &BigUint, root: u32, fraction_digits: u32) -> Self {
        let shift = BigUint::from(10u32).pow(fraction_digits * root);
        Decimal {
            scaled: (radicand * shift).nth_root(root),
            fraction_digits,
        }
    }

    pub fn ratio(numerator: u64, denominator: u64, fraction_digits: u32) -> Self {
        Decimal {
            scaled: BigUint::from(numerator) * BigUint::from(10u32).pow(fraction_digits)
                / denominator,
            fraction_digits,
        }
    }

    pub fn scaled(&self) -> &BigUint {
        &self.scaled
    }

    pub fn fraction_digits(&self) -> u32 {
        self.fraction_digits
    }

    pub fn to_f64(&self) -> f64 {
        let s = self.to_string();
        s.parse().unwrap_or(f64::NAN)
    }

    /// The first `sig` significant digits, truncated (not rounded).
    pub fn truncated(&self, sig: usize) -> String {
        let full = self.to_string();
        let mut out = String::new();
        let mut taken = 0;
        let mut leading = true;
        for ch in full.chars() {
            if taken == sig {
                break;
            }
            out.push(ch);
            if ch.is_ascii_digit() {
                if leading && ch == '0' {
                    continue;
                }
                leading = false;
                taken += 1;
            }
        }
        out
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = self.scaled.to_string();
        let fd = self.fraction_digits as usize;
        if fd == 0 {
            return f.write_str(&digits);
        }
        let padded = format!("{digits:0>width$}", width = fd + 1);
        let (int, frac) = padded.split_at(padded.len() - fd);
        write!(f, "{int}.{frac}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantKind {
    C1,
    C2,
    C3,
    C4,
    Degs16,
    Lsv10,
    Sharma27,
}

impl ConstantKind {
    pub const ALL: [ConstantKind; 7] = [
        ConstantKind::C1,
        ConstantKind::C2,
        ConstantKind::C3,
        ConstantKind::C4,
        ConstantKind::Degs16,
        ConstantKind::Lsv10,
        ConstantKind::Sharma27,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ConstantKind::C1 => "c1",
            ConstantKind::C2 => "c2",
            ConstantKind::C3 => "c3",
            ConstantKind::C4 => "c4",
            ConstantKind::Degs16 => "degs16",
            ConstantKind::Lsv10 => "lsv10",
            ConstantKind::Sharma27 => "sharma27",
        }
    }

    pub fn definition(&self) -> Definition {
        let root = |coefficient, defining_n| Definition::Root {
            coefficient,
            defining_n,
        };
        match self {
            ConstantKind::C1 => root(2, 80),
            ConstantKind::C2 => root(21, 64),
            ConstantKind::C3 => root(2, 64),
            ConstantKind::C4 => root(1, 40),
            ConstantKind::Degs16 => root(2, 16),
            ConstantKind::Lsv10 => root(2, 10),
            ConstantKind::Sharma27 => Definition::Ratio {
                numerator: 27,
                denominator: 10,
            },
        }
    }
}

impl fmt::Display for ConstantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ConstantKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        ConstantKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse {
                input: s.to_string(),
                reason: "unknown constant".into(),
            })
    }
}

/// How a constant is defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Definition {
    /// `c^m = coefficient * θ(m)` with `m = defining_n`; the root index is `m`.
    Root { coefficient: u32, defining_n: usize },
    /// A fixed rational.
    Ratio { numerator: u64, denominator: u64 },
}

impl Definition {
    /// `coefficient * θ(m)` for root definitions.
    pub fn radicand(&self) -> Option<BigUint> {
        match *self {
            Definition::Root {
                coefficient,
                defining_n,
            } => Some(GroundTruthTable::published().theta(defining_n) * coefficient),
            Definition::Ratio { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundConstant {
    pub kind: ConstantKind,
    pub definition: Definition,
    pub value: Decimal,
}

impl BoundConstant {
    /// True iff the truncated value `v` satisfies `v^m <= A θ(m) < (v + ulp)^m`,
    /// i.e. it is the exact floor of the real root at this precision.
    pub fn is_exact_floor(&self) -> bool {
        match self.definition {
            Definition::Root { defining_n, .. } => {
                let root = defining_n as u32;
                let target = self.definition.radicand().unwrap()
                    * BigUint::from(10u32).pow(self.value.fraction_digits * root);
                let v = &self.value.scaled;
                v.pow(root) <= target && (v + 1u32).pow(root) > target
            }
            Definition::Ratio {
                numerator,
                denominator,
            } => {
                let lhs = &self.value.scaled * denominator;
                let target =
                    BigUint::from(numerator) * BigUint::from(10u32).pow(self.value.fraction_digits);
                lhs <= target && lhs + denominator > target
            }
        }
    }
}

pub fn compute_constant(kind: ConstantKind) -> BoundConstant {
    let definition = kind.definition();
    let value = match definition {
        Definition::Root { defining_n, .. } => Decimal::root(
            &definition.radicand().unwrap(),
            defining_n as u32,
            FRACTION_DIGITS,
        ),
        Definition::Ratio {
            numerator,
            denominator,
        } => Decimal::ratio(numerator, denominator, FRACTION_DIGITS),
    };
    BoundConstant {
        kind,
        definition,
        value,
    }
}

/// `(coefficient * θ(n))^(1/n)` at [`FRACTION_DIGITS`] precision.
pub fn growth_root(coefficient: u32, n: usize) -> Decimal {
    let radicand = GroundTruthTable::published().theta(n) * coefficient;
    Decimal::root(&radicand, n as u32, FRACTION_DIGITS)
}

/// Natural log of a positive `BigUint`, for display only.
pub(crate) fn ln_big(x: &BigUint) -> f64 {
    debug_assert!(!x.is_zero());
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().unwrap().ln();
    }
    let shift = bits - 64;
    let top = (x >> shift).to_f64().unwrap();
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printed_leading_digits() {
        for (kind, printed) in [
            (ConstantKind::C1, "2.201"),
            (ConstantKind::C2, "2.364"),
            (ConstantKind::C3, "2.279"),
            (ConstantKind::C4, "2.156"),
            (ConstantKind::Degs16, "2.248"),
            (ConstantKind::Lsv10, "2.152"),
            (ConstantKind::Sharma27, "2.700"),
        ] {
            let c = compute_constant(kind);
            assert_eq!(c.value.truncated(4), printed, "{kind}");
            assert!(c.is_exact_floor(), "{kind}");
        }
    }

    #[test]
    fn enough_significant_digits() {
        let c = compute_constant(ConstantKind::C1);
        let digits = c
            .value
            .to_string()
            .chars()
            .filter(char::is_ascii_digit)
            .count();
        assert!(digits >= 30);
    }

    #[test]
    fn decimal_formatting() {
        let d = Decimal::ratio(1, 8, 4);
        assert_eq!(d.to_string(), "0.1250");
        assert_eq!(d.truncated(2), "0.12");
        assert_eq!(
            Decimal::root(&BigUint::from(4u32), 2, 3).to_string(),
            "2.000"
        );
        assert_eq!(
            Decimal::root(&BigUint::from(2u32), 2, 6).to_string(),
            "1.414213"
        );
    }

    #[test]
    fn names_round_trip() {
        for k in ConstantKind::ALL {
            assert_eq!(k.name().parse::<ConstantKind>().unwrap(), k);
        }
        assert!("c9".parse::<ConstantKind>().is_err());
    }

    #[test]
    fn log_of_large_values() {
        let x = BigUint::from(10u32).pow(500);
        assert!((ln_big(&x) - 500.0 * 10f64.ln()).abs() < 1e-9);
    }
}
