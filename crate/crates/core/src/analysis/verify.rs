//! Exact checks of the recurrences and growth bounds over the published table.
//!
//! A bound `θ(n) >= P(n) c^n / B` with `c^m = A θ(m)` is decided as
//! `(B θ(n))^m >= P(n)^m (A θ(m))^n` in integers, so no root is ever taken on
//! the pass/fail path. Root constants appear only in display strings.

use std::cmp::Ordering;

use num_bigint::BigUint;
use serde::Serialize;

use super::constants::{growth_root, ln_big};
use super::report::{Outcome, VerificationReport};
use super::table::{GroundTruthTable, TABLE_MAX_N};

fn theta(n: usize) -> &'static BigUint {
    GroundTruthTable::published().theta(n)
}

fn big(x: u64) -> BigUint {
    BigUint::from(x)
}

/// `x` in scientific notation from its natural log.
fn sci_from_ln(ln: f64) -> String {
    let log10 = ln / std::f64::consts::LN_10;
    let exp = log10.floor();
    let mantissa = 10f64.powf(log10 - exp);
    format!("{mantissa:.6}e{}", exp as i64)
}

fn exact_outcome(pass: bool, lhs: &BigUint, rhs: &BigUint) -> Outcome {
    Outcome {
        pass,
        equality: lhs == rhs,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Direction {
    Lower,
    Upper,
}

/// `θ(n) (>= | <=) [n ·] c^n / divisor` where `c^m = coefficient θ(m)`.
#[derive(Clone, Copy, Debug)]
struct RootBound {
    coefficient: u32,
    m: usize,
    divisor: u32,
    times_n: bool,
    direction: Direction,
}

impl RootBound {
    fn evaluate(&self, n: usize) -> Outcome {
        let m = self.m as u32;
        let lhs = (theta(n) * self.divisor).pow(m);
        let mut rhs = (theta(self.m) * self.coefficient).pow(n as u32);
        if self.times_n {
            rhs *= big(n as u64).pow(m);
        }
        let ord = lhs.cmp(&rhs);
        let pass = match self.direction {
            Direction::Lower => ord != Ordering::Less,
            Direction::Upper => ord != Ordering::Greater,
        };
        let mut ln_rhs = n as f64 / self.m as f64 * ln_big(&(theta(self.m) * self.coefficient))
            - f64::from(self.divisor).ln();
        if self.times_n {
            ln_rhs += (n as f64).ln();
        }
        Outcome {
            pass,
            equality: ord == Ordering::Equal,
            lhs: theta(n).to_string(),
            rhs: if ord == Ordering::Equal {
                theta(n).to_string()
            } else {
                sci_from_ln(ln_rhs)
            },
        }
    }
}

/// Smallest `n0` in `candidates` such that the check passes for every
/// candidate `>= n0`.
fn holds_from(candidates: &[usize], check: impl Fn(usize) -> bool) -> Option<usize> {
    let mut from = None;
    for &n in candidates.iter().rev() {
        if check(n) {
            from = Some(n);
        } else {
            break;
        }
    }
    from
}

fn sweep(
    name: &str,
    statement: &str,
    claimed: impl IntoIterator<Item = usize>,
    eval: impl Fn(usize) -> Outcome,
) -> VerificationReport {
    let mut report = VerificationReport::new(name, statement);
    for n in claimed {
        report.record(n, eval(n));
    }
    report
}

fn root_bound_report(
    name: &str,
    statement: &str,
    bound: RootBound,
    claimed: &[usize],
    survey: &[usize],
) -> VerificationReport {
    let mut report = sweep(name, statement, claimed.iter().copied(), |n| {
        bound.evaluate(n)
    });
    match holds_from(survey, |n| bound.evaluate(n).pass) {
        Some(n0) => report.note(format!(
            "on the table the inequality holds for every n >= {n0} (surveyed {}..={})",
            survey[0],
            survey[survey.len() - 1]
        )),
        None => report.note("on the table the inequality fails at the largest surveyed n"),
    }
    report
}

fn table_range() -> Vec<usize> {
    (1..=TABLE_MAX_N).collect()
}

fn powers_of_two(from_k: u32) -> Vec<usize> {
    (from_k..)
        .map(|k| 1usize << k)
        .take_while(|&n| n <= TABLE_MAX_N)
        .collect()
}

/// `θ(2n) >= 2 θ(n)^2` and `θ(2n+1) >= 2 θ(n) θ(n+1)`, keyed by the left-hand
/// index `2n` or `2n + 1` (so `n = 1..=45` and `n = 1..=44`).
pub fn verify_degs_recurrences() -> VerificationReport {
    sweep(
        "degs-recurrences",
        "θ(2n) >= 2θ(n)^2 and θ(2n+1) >= 2θ(n)θ(n+1)",
        2..=TABLE_MAX_N,
        |t| {
            let half = t / 2;
            let rhs = if t % 2 == 0 {
                theta(half).pow(2) * 2u32
            } else {
                theta(half) * theta(half + 1) * 2u32
            };
            let lhs = theta(t);
            exact_outcome(*lhs >= rhs, lhs, &rhs)
        },
    )
}

/// `θ(n) <= 21 θ(ceil(n/2)) θ(floor(n/2))` for `3 <= n <= 90`.
pub fn verify_sharma_recurrence() -> VerificationReport {
    sweep(
        "sharma-recurrence",
        "θ(n) <= 21 θ(ceil(n/2)) θ(floor(n/2)) for n >= 3",
        3..=TABLE_MAX_N,
        |n| {
            let rhs = theta(n.div_ceil(2)) * theta(n / 2) * 21u32;
            let lhs = theta(n);
            exact_outcome(*lhs <= rhs, lhs, &rhs)
        },
    )
}

/// Where `(A θ(n))^(1/n)` is extremal over an index range.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Extremum {
    pub n: usize,
    /// Other `n` attaining exactly the same value.
    pub ties: Vec<usize>,
    pub value: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtremalBases {
    pub range: (usize, usize),
    /// argmin of `(2θ(n))^(1/n)`.
    pub lower_argmin: Extremum,
    /// argmax of `(21θ(n))^(1/n)`.
    pub upper_argmax: Extremum,
}

/// Orders `(A θ(a))^(1/a)` against `(A θ(b))^(1/b)` via
/// `(A θ(a))^b` vs `(A θ(b))^a`.
fn cmp_growth(coefficient: u32, a: usize, b: usize) -> Ordering {
    let x = (theta(a) * coefficient).pow(b as u32);
    let y = (theta(b) * coefficient).pow(a as u32);
    x.cmp(&y)
}

fn extremum(coefficient: u32, lo: usize, hi: usize, want: Ordering) -> Extremum {
    let mut best = lo;
    for n in lo + 1..=hi {
        if cmp_growth(coefficient, n, best) == want {
            best = n;
        }
    }
    let ties = (lo..=hi)
        .filter(|&n| n != best && cmp_growth(coefficient, n, best) == Ordering::Equal)
        .collect();
    Extremum {
        n: best,
        ties,
        value: growth_root(coefficient, best).truncated(12),
    }
}

/// Extremal base cases over `42 <= n <= 83`.
pub fn extremal_bases() -> ExtremalBases {
    let (lo, hi) = (42, 83);
    ExtremalBases {
        range: (lo, hi),
        lower_argmin: extremum(2, lo, hi, Ordering::Less),
        upper_argmax: extremum(21, lo, hi, Ordering::Greater),
    }
}

/// The four headline bounds, one report each, over their claimed table ranges:
///
/// * `θ(n) >= c1^n / 2`, `c1^80 = 2θ(80)`, `n >= 45`
/// * `θ(n) <= c2^n / 21`, `c2^64 = 21θ(64)`, `n >= 36`
/// * `θ(n) >= c3^n / 2`, `c3^64 = 2θ(64)`, `n = 2^k`, `k >= 6`
/// * `θ(n) >= n c4^n / 40`, `c4^40 = θ(40)`, all `n`
pub fn verify_main_bounds() -> Vec<VerificationReport> {
    let all = table_range();
    let extremal = extremal_bases();

    let c1 = RootBound {
        coefficient: 2,
        m: 80,
        divisor: 2,
        times_n: false,
        direction: Direction::Lower,
    };
    let mut r1 = root_bound_report(
        "theorem2-lower-c1",
        "θ(n) >= c1^n / 2 with c1 = (2θ(80))^(1/80), n >= 45",
        c1,
        &(45..=TABLE_MAX_N).collect::<Vec<_>>(),
        &all,
    );
    r1.note(format!(
        "c1 = {}; min over n in [42, 83] of (2θ(n))^(1/n) = {} at n = {}",
        growth_root(2, 80).truncated(12),
        extremal.lower_argmin.value,
        extremal.lower_argmin.n
    ));

    let c2 = RootBound {
        coefficient: 21,
        m: 64,
        divisor: 21,
        times_n: false,
        direction: Direction::Upper,
    };
    let mut r2 = root_bound_report(
        "theorem3-upper-c2",
        "θ(n) <= c2^n / 21 with c2 = (21θ(64))^(1/64), n >= 36",
        c2,
        &(36..=TABLE_MAX_N).collect::<Vec<_>>(),
        &all,
    );
    r2.note(format!(
        "max over n in [42, 83] of (21θ(n))^(1/n) = {} at n = {}",
        extremal.upper_argmax.value, extremal.upper_argmax.n
    ));

    let c3 = RootBound {
        coefficient: 2,
        m: 64,
        divisor: 2,
        times_n: false,
        direction: Direction::Lower,
    };
    let r3 = root_bound_report(
        "theorem4-lower-c3",
        "θ(n) >= c3^n / 2 with c3 = (2θ(64))^(1/64), n = 2^k, k >= 6",
        c3,
        &powers_of_two(6),
        &powers_of_two(0),
    );

    let c4 = RootBound {
        coefficient: 1,
        m: 40,
        divisor: 40,
        times_n: true,
        direction: Direction::Lower,
    };
    let r4 = root_bound_report(
        "theorem5-lower-c4",
        "θ(n) >= n c4^n / 40 with c4 = θ(40)^(1/40), all n",
        c4,
        &all,
        &all,
    );

    vec![r1, r2, r3, r4]
}

/// Base cases of the doubling induction with `α = c4`, plus the finite
/// monotonicity surrogate `a_2n >= a_n`, `a_2n+1 >= a_n+1` for
/// `a_n = θ(n) / (n α^n)`.
pub fn verify_theorem12_bases() -> Vec<VerificationReport> {
    let t40 = theta(40);

    let mut bases = VerificationReport::new(
        "theorem12-bases",
        "θ(n) >= α^n on [40, 79] (p = 2) and θ(n) >= 2α^n on [80, 90] (p = 3 part), α = θ(40)^(1/40)",
    );
    for n in 40..=TABLE_MAX_N {
        let factor = if n < 80 { 1u32 } else { 2 };
        let lhs = theta(n).pow(40);
        let rhs = big(u64::from(factor)).pow(40) * t40.pow(n as u32);
        let ln_rhs = f64::from(factor).ln() + n as f64 / 40.0 * ln_big(t40);
        bases.record(
            n,
            Outcome {
                pass: lhs >= rhs,
                equality: lhs == rhs,
                lhs: theta(n).to_string(),
                rhs: if lhs == rhs {
                    theta(n).to_string()
                } else {
                    sci_from_ln(ln_rhs)
                },
            },
        );
    }

    // a_2n >= a_n      <=>  θ(2n)^40 >= 2^40 θ(n)^40 θ(40)^n
    // a_2n+1 >= a_n+1  <=>  ((n+1) θ(2n+1))^40 >= ((2n+1) θ(n+1))^40 θ(40)^n
    let mut surrogate = VerificationReport::new(
        "theorem13-surrogate",
        "a_2n >= a_n and a_2n+1 >= a_n+1 for a_n = θ(n)/(n α^n), n >= 40, keyed by 2n / 2n+1",
    );
    for t in 80..=TABLE_MAX_N {
        let n = t / 2;
        let (lhs, rhs) = if t % 2 == 0 {
            (
                theta(t).pow(40),
                (theta(n) * 2u32).pow(40) * t40.pow(n as u32),
            )
        } else {
            (
                (theta(t) * big(n as u64 + 1)).pow(40),
                (theta(n + 1) * big(t as u64)).pow(40) * t40.pow(n as u32),
            )
        };
        let (ln_l, ln_r) = (ln_big(&lhs), ln_big(&rhs));
        surrogate.record(
            t,
            Outcome {
                pass: lhs >= rhs,
                equality: lhs == rhs,
                lhs: format!("ln = {ln_l:.6}"),
                rhs: format!("ln = {ln_r:.6}"),
            },
        );
    }

    vec![bases, surrogate]
}

/// Table sweeps of the earlier published bounds:
///
/// * `θ(n) >= c^n / 2`, `c^16 = 2θ(16)`, `n = 2^k`, `k >= 4`
/// * `θ(n) <= 2.7^n / 21`, `n >= 11`
/// * `θ(n) >= n 2^n / 10`, all `n`
/// * `θ(n) >= c^n / 2`, `c^10 = 2θ(10)`, `n >= 8`
pub fn verify_literature_bounds() -> Vec<VerificationReport> {
    let all = table_range();
    let degs16 = RootBound {
        coefficient: 2,
        m: 16,
        divisor: 2,
        times_n: false,
        direction: Direction::Lower,
    };
    let r7 = root_bound_report(
        "theorem7-lower-degs16",
        "θ(n) >= c^n / 2 with c = (2θ(16))^(1/16), n = 2^k, k >= 4",
        degs16,
        &powers_of_two(4),
        &powers_of_two(0),
    );

    let sharma_upper = |n: usize| {
        // θ(n) <= 27^n / (21 · 10^n)
        let lhs = theta(n) * 21u32 * big(10).pow(n as u32);
        let rhs = big(27).pow(n as u32);
        Outcome {
            pass: lhs <= rhs,
            equality: lhs == rhs,
            lhs: theta(n).to_string(),
            rhs: sci_from_ln(n as f64 * 2.7f64.ln() - 21f64.ln()),
        }
    };
    let mut r9 = sweep(
        "theorem9-upper-2.7",
        "θ(n) <= 2.7^n / 21, n >= 11",
        11..=TABLE_MAX_N,
        sharma_upper,
    );
    if let Some(n0) = holds_from(&all, |n| sharma_upper(n).pass) {
        r9.note(format!(
            "on the table the inequality holds for every n >= {n0}"
        ));
    }

    let r10 = sweep(
        "theorem10-lower-n2n",
        "θ(n) >= n 2^n / 10, all n",
        1..=TABLE_MAX_N,
        |n| {
            let lhs = theta(n) * 10u32;
            let rhs = big(2).pow(n as u32) * n;
            Outcome {
                pass: lhs >= rhs,
                equality: lhs == rhs,
                lhs: theta(n).to_string(),
                rhs: format!("{rhs}/10"),
            }
        },
    );

    let lsv = RootBound {
        coefficient: 2,
        m: 10,
        divisor: 2,
        times_n: false,
        direction: Direction::Lower,
    };
    let r11 = root_bound_report(
        "theorem11-lower-lsv10",
        "θ(n) >= c^n / 2 with c = (2θ(10))^(1/10), n >= 8",
        lsv,
        &(8..=TABLE_MAX_N).collect::<Vec<_>>(),
        &all,
    );

    vec![r7, r9, r10, r11]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degs_spot_checks() {
        let r = verify_degs_recurrences();
        // n = 5: θ(10) = 1066 >= 2 · 20^2 = 800
        let o = &r.per_n[&10];
        assert!(o.pass);
        assert_eq!((o.lhs.as_str(), o.rhs.as_str()), ("1066", "800"));
        assert!(r.per_n[&90].pass);
        assert_eq!(r.per_n.len(), 89);
        assert!(r.overall);
    }

    #[test]
    fn sharma_spot_checks() {
        let r = verify_sharma_recurrence();
        assert_eq!(r.per_n[&10].rhs, "8400");
        assert!(r.per_n[&89].pass);
        assert_eq!(r.per_n.len(), 88);
        assert!(r.overall);
    }

    #[test]
    fn defining_points_are_equalities() {
        let reports = verify_main_bounds();
        let by_name = |name: &str| reports.iter().find(|r| r.check_name == name).unwrap();
        assert!(by_name("theorem5-lower-c4").per_n[&40].equality);
        assert!(by_name("theorem3-upper-c2").per_n[&64].equality);
        assert!(by_name("theorem4-lower-c3").per_n[&64].equality);
        assert!(by_name("theorem2-lower-c1").per_n[&80].equality);
    }

    #[test]
    fn upper_extremum_at_64() {
        assert_eq!(extremal_bases().upper_argmax.n, 64);
    }

    #[test]
    fn theorem12_base_at_40_is_equality() {
        let r = &verify_theorem12_bases()[0];
        assert!(r.per_n[&40].equality);
        assert!(r.per_n[&80].pass);
    }

    #[test]
    fn growth_comparison_is_antisymmetric() {
        assert_eq!(cmp_growth(2, 42, 80), cmp_growth(2, 80, 42).reverse());
        assert_eq!(cmp_growth(2, 50, 50), Ordering::Equal);
    }

    #[test]
    fn holds_from_scans_suffix() {
        assert_eq!(holds_from(&[1, 2, 3, 4], |n| n != 2), Some(3));
        assert_eq!(holds_from(&[1, 2, 3, 4], |n| n != 4), None);
        assert_eq!(holds_from(&[1, 2, 3], |_| true), Some(1));
    }
}
