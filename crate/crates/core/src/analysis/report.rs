use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

/// One evaluated instance of an inequality.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Outcome {
    pub pass: bool,
    /// Both sides hold the same value.
    pub equality: bool,
    /// Display forms of the two sides. Exact where the sides are table
    /// products; scientific approximations where a root constant is involved.
    pub lhs: String,
    pub rhs: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub statement: String,
    pub per_n: BTreeMap<usize, Outcome>,
    pub overall: bool,
    pub witnesses: Vec<usize>,
    /// Extra computed facts (extremal `n`, smallest valid `n`, ...).
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check_name: &str, statement: &str) -> Self {
        VerificationReport {
            check_name: check_name.to_string(),
            statement: statement.to_string(),
            per_n: BTreeMap::new(),
            overall: true,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn record(&mut self, n: usize, outcome: Outcome) {
        if !outcome.pass {
            self.overall = false;
            self.witnesses.push(n);
        }
        self.per_n.insert(n, outcome);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn status(&self) -> &'static str {
        if self.overall {
            "PASS"
        } else {
            "FAIL"
        }
    }

    fn range(&self) -> String {
        match (self.per_n.keys().next(), self.per_n.keys().next_back()) {
            (Some(a), Some(b)) => format!("n in [{a}, {b}]"),
            _ => "no n evaluated".to_string(),
        }
    }

    /// Human-readable summary; `detailed` adds one line per `n`.
    pub fn render_text(&self, detailed: bool) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} {}: {} ({}, {} checked)",
            self.status(),
            self.check_name,
            self.statement,
            self.range(),
            self.per_n.len()
        );
        if !self.witnesses.is_empty() {
            let list: Vec<String> = self.witnesses.iter().map(usize::to_string).collect();
            let _ = writeln!(out, "  failing n: {}", list.join(", "));
        }
        for note in &self.notes {
            let _ = writeln!(out, "  {note}");
        }
        if detailed {
            for (n, o) in &self.per_n {
                let rel = match (o.pass, o.equality) {
                    (_, true) => "equal",
                    (true, false) => "ok",
                    (false, false) => "FAIL",
                };
                let _ = writeln!(out, "  n={n:<3} {rel:<5} lhs={} rhs={}", o.lhs, o.rhs);
            }
        }
        out
    }

    /// JSON record; per-`n` detail only when `detailed`.
    pub fn to_json(&self, detailed: bool) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if !detailed {
            v.as_object_mut().unwrap().remove("per_n");
            v["checked"] = self.per_n.len().into();
        }
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn outcome(pass: bool) -> Outcome {
        Outcome {
            pass,
            equality: false,
            lhs: "1".into(),
            rhs: "2".into(),
        }
    }

    #[test]
    fn overall_tracks_failures() {
        let mut r = VerificationReport::new("demo", "x <= y");
        r.record(3, outcome(true));
        assert!(r.overall);
        r.record(5, outcome(false));
        r.record(4, outcome(true));
        assert!(!r.overall);
        assert_eq!(r.witnesses, vec![5]);
        assert!(r
            .render_text(false)
            .starts_with("FAIL demo: x <= y (n in [3, 5], 3 checked)"));
        assert!(r.render_text(true).contains("n=5   FAIL"));
    }

    #[test]
    fn json_omits_detail_on_request() {
        let mut r = VerificationReport::new("demo", "s");
        r.record(1, outcome(true));
        let brief = r.to_json(false);
        assert!(brief.get("per_n").is_none());
        assert_eq!(brief["checked"], 1);
        assert_eq!(r.to_json(true)["per_n"]["1"]["pass"], true);
    }
}
