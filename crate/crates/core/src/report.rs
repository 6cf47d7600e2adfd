//! Experiment reports: per-case rows plus an aggregate verdict.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRow {
    pub case_id: u64,
    /// Ordered `(name, value)` parameter tuple for the case.
    pub params: Vec<(String, String)>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub pass: bool,
    /// Name of the inequality the row checks.
    pub anchor: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl CaseRow {
    /// A row for `lhs ≤ factor·rhs`; the ratio is `lhs / rhs`.
    pub fn bound(case_id: u64, params: Vec<(String, String)>, lhs: f64, rhs: f64, factor: f64, anchor: &str) -> Self {
        let ratio = if rhs != 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        let pass = lhs.is_finite() && rhs.is_finite() && lhs <= rhs * factor;
        Self {
            case_id,
            params,
            lhs,
            rhs,
            ratio,
            pass,
            anchor: anchor.to_string(),
            error: None,
        }
    }

    /// A row whose pass flag is decided by the caller.
    pub fn measured(case_id: u64, params: Vec<(String, String)>, lhs: f64, rhs: f64, pass: bool, anchor: &str) -> Self {
        let ratio = if rhs != 0.0 { lhs / rhs } else { f64::NAN };
        Self {
            case_id,
            params,
            lhs,
            rhs,
            ratio,
            pass: pass && ratio.is_finite(),
            anchor: anchor.to_string(),
            error: None,
        }
    }

    pub fn failed(case_id: u64, params: Vec<(String, String)>, anchor: &str, error: String) -> Self {
        Self {
            case_id,
            params,
            lhs: f64::NAN,
            rhs: f64::NAN,
            ratio: f64::NAN,
            pass: false,
            anchor: anchor.to_string(),
            error: Some(error),
        }
    }
}

/// Convenience for building parameter tuples.
pub fn param(name: &str, value: impl ToString) -> (String, String) {
    (name.to_string(), value.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub violations: usize,
    /// Largest finite ratio among successful rows; `0` when there are none.
    pub empirical_sup: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refinement_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub suite: String,
    pub cases: Vec<CaseRow>,
    pub aggregate: Aggregate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ceiling: Option<f64>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ExperimentReport {
    pub fn from_cases(suite: &str, mut cases: Vec<CaseRow>, ceiling: Option<f64>) -> Self {
        cases.sort_by_key(|c| c.case_id);
        let violations = cases.iter().filter(|c| !c.pass).count();
        let empirical_sup = cases
            .iter()
            .filter(|c| c.error.is_none() && c.ratio.is_finite())
            .map(|c| c.ratio)
            .fold(0.0, f64::max);
        let mut report = Self {
            suite: suite.to_string(),
            aggregate: Aggregate {
                count: cases.len(),
                violations,
                empirical_sup,
                refinement_delta: None,
            },
            cases,
            ceiling,
            passed: false,
            notes: Vec::new(),
        };
        report.passed = report.verdict();
        report
    }

    fn verdict(&self) -> bool {
        self.aggregate.violations == 0 && self.ceiling.is_none_or(|c| self.aggregate.empirical_sup <= c)
    }

    /// Merges several reports into one suite, renumbering cases sequentially.
    pub fn merge(suite: &str, parts: Vec<ExperimentReport>, ceiling: Option<f64>) -> Self {
        let mut cases = Vec::new();
        let mut notes = Vec::new();
        for part in parts {
            notes.extend(part.notes);
            for mut c in part.cases {
                c.params.insert(0, param("part", &part.suite));
                cases.push(c);
            }
        }
        for (i, c) in cases.iter_mut().enumerate() {
            c.case_id = i as u64;
        }
        let mut report = Self::from_cases(suite, cases, ceiling);
        report.notes = notes;
        report
    }

    pub fn with_refinement_delta(mut self, delta: f64, limit: f64) -> Self {
        self.aggregate.refinement_delta = Some(delta);
        self.passed = self.verdict() && delta <= limit;
        self
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub const CSV_HEADER: &'static str = "suite,case_id,params,lhs,rhs,ratio,pass,anchor";

    /// Per-case rows as CSV: LF line endings, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(Self::CSV_HEADER);
        out.push('\n');
        for c in &self.cases {
            let params = c
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                csv_field(&self.suite),
                c.case_id,
                csv_field(&params),
                fmt_f64(c.lhs),
                fmt_f64(c.rhs),
                fmt_f64(c.ratio),
                c.pass,
                csv_field(&c.anchor)
            );
        }
        out
    }
}

/// 17 significant digits, `.` decimal separator.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v:.16e}")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
