//! Piecewise monotonicity of `h(n) = ln θ(n+1) - ln θ(n)`.
//!
//! `h(n+1) > h(n)` iff `θ(n) θ(n+2) > θ(n+1)^2`, so every direction is
//! decided by an exact integer comparison. Logarithms are for display.

use std::cmp::Ordering;

use serde::Serialize;

use super::constants::ln_big;
use super::report::{Outcome, VerificationReport};
use super::table::{GroundTruthTable, TABLE_MAX_N};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Trend {
    Increasing,
    Decreasing,
    Flat,
}

/// `h(n)` and the direction of the step to `h(n+1)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HStep {
    pub n: usize,
    /// Natural log, display only.
    pub h: f64,
    /// `None` at the last `n` whose successor is outside the table.
    pub next: Option<Trend>,
}

/// Direction from `h(n)` to `h(n+1)`; needs `θ(n+2)`.
pub fn h_trend(n: usize) -> Option<Trend> {
    if n == 0 || n + 2 > TABLE_MAX_N {
        return None;
    }
    let t = GroundTruthTable::published();
    let outer = t.theta(n) * t.theta(n + 2);
    let inner = t.theta(n + 1).pow(2);
    Some(match outer.cmp(&inner) {
        Ordering::Greater => Trend::Increasing,
        Ordering::Less => Trend::Decreasing,
        Ordering::Equal => Trend::Flat,
    })
}

/// `h(1..=89)` with step directions.
pub fn h_sequence() -> Vec<HStep> {
    let t = GroundTruthTable::published();
    (1..TABLE_MAX_N)
        .map(|n| HStep {
            n,
            h: ln_big(t.theta(n + 1)) - ln_big(t.theta(n)),
            next: h_trend(n),
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentStatus {
    Pass,
    Fail,
    PartialPass,
    PartialFail,
    Unavailable,
}

/// One monotone piece of the conjecture for a given `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Segment {
    /// Interval of `h` arguments, inclusive.
    pub interval: (usize, usize),
    pub expected: Trend,
    /// Steps `n -> n+1` that the table can decide.
    pub steps_checked: Vec<usize>,
    pub violations: Vec<usize>,
    pub status: SegmentStatus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KOutcome {
    pub k: u32,
    pub segments: Vec<Segment>,
}

impl KOutcome {
    pub fn complete(&self) -> bool {
        self.segments
            .iter()
            .all(|s| matches!(s.status, SegmentStatus::Pass | SegmentStatus::Fail))
    }

    pub fn holds_on_available(&self) -> bool {
        self.segments.iter().all(|s| s.violations.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConjectureReport {
    pub per_k: Vec<KOutcome>,
    /// Per-step record: `n` is the step `h(n) -> h(n+1)`.
    pub steps: VerificationReport,
}

fn segment(lo: usize, hi: usize, expected: Trend) -> Segment {
    // Steps lo..hi-1 for an interval, or the single step lo for a pair.
    let wanted: Vec<usize> = (lo..hi).collect();
    let steps_checked: Vec<usize> = wanted
        .iter()
        .copied()
        .filter(|&n| h_trend(n).is_some())
        .collect();
    let violations: Vec<usize> = steps_checked
        .iter()
        .copied()
        .filter(|&n| h_trend(n) != Some(expected))
        .collect();
    let full = steps_checked.len() == wanted.len();
    let status = match (steps_checked.is_empty(), full, violations.is_empty()) {
        (true, _, _) => SegmentStatus::Unavailable,
        (false, true, true) => SegmentStatus::Pass,
        (false, true, false) => SegmentStatus::Fail,
        (false, false, true) => SegmentStatus::PartialPass,
        (false, false, false) => SegmentStatus::PartialFail,
    };
    Segment {
        interval: (lo, hi),
        expected,
        steps_checked,
        violations,
        status,
    }
}

/// For each `k >= 2` whose range starts inside the table: `h` increasing on
/// `[2^k, 2^k + 2^(k-1) - 1]` and `[2^k + 2^(k-1), 2^(k+1) - 1]`, decreasing
/// across `[2^k + 2^(k-1) - 1, 2^k + 2^(k-1)]` and `[2^(k+1) - 1, 2^(k+1)]`.
/// Pieces cut off by the end of the table are marked partial or unavailable.
pub fn check_conjecture() -> ConjectureReport {
    let mut per_k = Vec::new();
    let mut steps = VerificationReport::new(
        "conjecture-h",
        "h increasing on [2^k, 2^k+2^(k-1)-1] and [2^k+2^(k-1), 2^(k+1)-1], decreasing across each boundary pair, k >= 2",
    );
    for k in 2u32.. {
        let start = 1usize << k;
        if start + 1 >= TABLE_MAX_N {
            break;
        }
        let mid = start + (1 << (k - 1));
        let end = 2 * start;
        let segments = vec![
            segment(start, mid - 1, Trend::Increasing),
            segment(mid - 1, mid, Trend::Decreasing),
            segment(mid, end - 1, Trend::Increasing),
            segment(end - 1, end, Trend::Decreasing),
        ];
        for seg in &segments {
            for &n in &seg.steps_checked {
                let actual = h_trend(n).unwrap();
                steps.record(
                    n,
                    Outcome {
                        pass: actual == seg.expected,
                        equality: actual == Trend::Flat,
                        lhs: format!("{:?}", actual).to_lowercase(),
                        rhs: format!("{:?}", seg.expected).to_lowercase(),
                    },
                );
            }
        }
        let outcome = KOutcome { k, segments };
        steps.note(format!(
            "k = {k}: {}{}",
            if outcome.holds_on_available() {
                "holds"
            } else {
                "violated"
            },
            if outcome.complete() {
                ""
            } else {
                " (partial: table ends at n = 90)"
            }
        ));
        per_k.push(outcome);
    }
    ConjectureReport { per_k, steps }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_to_five() {
        // θ(4) θ(6) = 480 > θ(5)^2 = 400
        assert_eq!(h_trend(4), Some(Trend::Increasing));
    }

    #[test]
    fn edges() {
        assert_eq!(h_trend(0), None);
        assert!(h_trend(88).is_some());
        assert_eq!(h_trend(89), None);
        let seq = h_sequence();
        assert_eq!(seq.len(), 89);
        assert_eq!(seq.last().unwrap().next, None);
        assert!((seq[0].h - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn steps_partition_the_table() {
        let r = check_conjecture();
        let ks: Vec<u32> = r.per_k.iter().map(|o| o.k).collect();
        assert_eq!(ks, [2, 3, 4, 5, 6]);
        assert_eq!(
            r.steps.per_n.keys().copied().collect::<Vec<_>>(),
            (4..=88).collect::<Vec<_>>()
        );
        assert!(r.per_k[..4].iter().all(KOutcome::complete));
        assert!(!r.per_k[4].complete());
        assert_eq!(r.per_k[4].segments[2].status, SegmentStatus::Unavailable);
    }

    #[test]
    fn boundary_pair_k4() {
        let r = check_conjecture();
        let seg = &r.per_k[2].segments[1];
        assert_eq!(seg.interval, (23, 24));
        assert_eq!(seg.steps_checked, [23]);
    }
}
