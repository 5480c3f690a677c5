use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("ground-set size {0} is outside 1..=127")]
    InvalidSize(usize),

    #[error("element {value} at position {position} is outside 1..={n}")]
    OutOfRange {
        position: usize,
        value: usize,
        n: usize,
    },

    #[error("element {value} at position {position} is a duplicate")]
    Duplicate { position: usize, value: usize },

    #[error("element {value} at position {position} completes a 3-term arithmetic progression")]
    NotThreeFree { position: usize, value: usize },

    #[error("permutation has {len} of {n} elements")]
    Incomplete { len: usize, n: usize },

    #[error("mask string {0:?} is not a non-empty run of '0'/'1' of length at most 127")]
    InvalidMask(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("memory cap of {cap} resident states exceeded ({states} states, layer {layer:?})")]
    MemoryBudget {
        cap: u64,
        states: u64,
        layer: Option<usize>,
    },

    #[error("layered run interrupted after layer {layer}; checkpoint in {}", dir.display())]
    Interrupted { layer: usize, dir: PathBuf },

    #[error("checkpoint checksum mismatch")]
    Checksum,

    #[error("checkpoint format version {found} is not supported (expected {expected})")]
    Version { found: u16, expected: u16 },

    #[error("corrupt checkpoint: {0}")]
    Corrupt(String),

    #[error("checkpoint does not match this run: {0}")]
    CheckpointMismatch(String),

    #[error("n = {n} is outside the embedded table 1..=90")]
    OutsideTable { n: usize },

    #[error("computed value {computed} for n = {n} disagrees with table value {expected}")]
    Mismatch {
        n: usize,
        computed: String,
        expected: String,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}
