//! The published values `θ(1..=90)` and exact-arithmetic checks against them.

mod conjecture;
mod constants;
mod export;
mod report;
mod table;
mod verify;

pub use conjecture::{
    check_conjecture, h_sequence, h_trend, ConjectureReport, HStep, KOutcome, Segment,
    SegmentStatus, Trend,
};
pub use constants::{
    compute_constant, growth_root, BoundConstant, ConstantKind, Decimal, Definition,
    FRACTION_DIGITS,
};
pub use export::{export, parse_bfile, ExportFormat, ExportSource};
pub use report::{Outcome, VerificationReport};
pub use table::{ground_truth, GroundTruthTable, TABLE_MAX_N};
pub use verify::{
    extremal_bases, verify_degs_recurrences, verify_literature_bounds, verify_main_bounds,
    verify_sharma_recurrence, verify_theorem12_bases, ExtremalBases, Extremum,
};
