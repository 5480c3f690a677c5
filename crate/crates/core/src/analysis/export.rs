//! Sequence export as an OEIS b-file or CSV.

use std::fmt::Write as _;
use std::str::FromStr;

use super::table::{GroundTruthTable, TABLE_MAX_N};
use crate::count::BigCount;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    /// `n value` per line.
    BFile,
    /// Header `n,theta`, then `n,value` per line.
    Csv,
}

impl FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bfile" | "b-file" => Ok(ExportFormat::BFile),
            "csv" => Ok(ExportFormat::Csv),
            _ => Err(Error::Parse {
                input: s.to_string(),
                reason: "expected bfile or csv".into(),
            }),
        }
    }
}

/// Rows to export, always starting at `n = 1`.
#[derive(Clone, Debug)]
pub enum ExportSource {
    Table,
    /// `values[i]` is `θ(i + 1)`.
    Computed(Vec<BigCount>),
}

/// Renders `n = 1, 2, ...` rows, LF-terminated. Computed rows are compared
/// against the table first; the first disagreement aborts the export.
pub fn export(format: ExportFormat, source: &ExportSource) -> Result<String> {
    let table = GroundTruthTable::published();
    let rows: Vec<&BigCount> = match source {
        ExportSource::Table => table.iter().map(|(_, v)| v).collect(),
        ExportSource::Computed(values) => {
            for (i, v) in values.iter().enumerate().take(TABLE_MAX_N) {
                let expected = table.get(i + 1)?;
                if v != expected {
                    return Err(Error::Mismatch {
                        n: i + 1,
                        computed: v.to_string(),
                        expected: expected.to_string(),
                    });
                }
            }
            values.iter().collect()
        }
    };
    let mut out = String::new();
    if format == ExportFormat::Csv {
        out.push_str("n,theta\n");
    }
    let sep = match format {
        ExportFormat::BFile => ' ',
        ExportFormat::Csv => ',',
    };
    for (i, v) in rows.into_iter().enumerate() {
        let _ = writeln!(out, "{}{sep}{v}", i + 1);
    }
    Ok(out)
}

/// Reads `n value` lines, skipping blank lines and `#` comments.
pub fn parse_bfile(text: &str) -> Result<Vec<(usize, BigCount)>> {
    let bad = |line: &str, reason: &str| Error::Parse {
        input: line.to_string(),
        reason: reason.to_string(),
    };
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|line| {
            let mut parts = line.split_whitespace();
            let (Some(n), Some(v), None) = (parts.next(), parts.next(), parts.next()) else {
                return Err(bad(line, "expected two fields"));
            };
            let n = n
                .parse()
                .map_err(|_| bad(line, "index is not an integer"))?;
            Ok((n, v.parse()?))
        })
        .collect()
}
