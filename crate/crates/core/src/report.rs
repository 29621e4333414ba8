//! Check records, the verification report and its three output files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::norms::NormCurve;
use crate::asymptotics::regions::BoundKind;
use crate::error::{Error, Result};

pub const CURVES_FILE: &str = "curves.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const TABLE_FILE: &str = "report.txt";
pub const CURVES_HEADER: &str = "quantity,region,m,c1,c2,t,value";

/// Non-finite values are stored as `None` so the summary round-trips.
pub fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// the claim being tested, or `"exploratory"`
    pub anchor: String,
    pub predicted: Option<f64>,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    pub exploratory: bool,
    pub detail: String,
}

impl CheckRecord {
    pub fn new(id: impl Into<String>, anchor: impl Into<String>) -> Self {
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            predicted: None,
            measured: None,
            tolerance: None,
            pass: false,
            exploratory: false,
            detail: String::new(),
        }
    }

    pub fn predicted(mut self, x: f64) -> Self {
        self.predicted = finite(x);
        self
    }

    pub fn measured(mut self, x: f64) -> Self {
        self.measured = finite(x);
        self
    }

    pub fn tolerance(mut self, x: f64) -> Self {
        self.tolerance = finite(x);
        self
    }

    pub fn pass(mut self, p: bool) -> Self {
        self.pass = p;
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = d.into();
        self
    }

    pub fn exploratory(mut self) -> Self {
        self.exploratory = true;
        self.anchor = "exploratory".into();
        self.pass = true;
        self
    }

    /// Failed record for an operation that returned an error.
    pub fn failed(id: impl Into<String>, anchor: impl Into<String>, err: &Error) -> Self {
        Self::new(id, anchor).detail(format!("error: {err}"))
    }
}

/// Fit summary of one [`NormCurve`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveFit {
    pub quantity: String,
    pub region: String,
    pub m: u32,
    pub c1: f64,
    pub c2: f64,
    pub samples: usize,
    pub fitted_exponent: Option<f64>,
    pub predicted_exponent: Option<f64>,
    pub bound_kind: BoundKind,
    pub log_corrected: bool,
    pub r_squared: Option<f64>,
}

impl From<&NormCurve> for CurveFit {
    fn from(c: &NormCurve) -> Self {
        CurveFit {
            quantity: c.quantity.tag().into(),
            region: c.region.clone(),
            m: c.m,
            c1: c.c1,
            c2: c.c2,
            samples: c.samples.len(),
            fitted_exponent: finite(c.fitted_exponent),
            predicted_exponent: c.predicted_exponent.and_then(finite),
            bound_kind: c.bound_kind,
            log_corrected: c.log_corrected,
            r_squared: finite(c.r_squared),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub exploratory: usize,
}

/// The deterministic part of a run, written as the summary file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub suite: String,
    pub seed: u64,
    pub warnings: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub fits: Vec<CurveFit>,
    pub counts: Counts,
}

#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub suite: String,
    pub seed: u64,
    pub warnings: Vec<String>,
    pub checks: Vec<CheckRecord>,
    pub curves: Vec<NormCurve>,
    /// wall-clock seconds per check id; kept out of the summary
    pub runtimes: Vec<(String, f64)>,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64) -> Self {
        VerificationReport { suite: suite.into(), seed, ..Default::default() }
    }

    pub fn push(&mut self, c: CheckRecord) {
        self.checks.push(c);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.curves.extend(other.curves);
        self.runtimes.extend(other.runtimes);
        for w in other.warnings {
            if !self.warnings.contains(&w) {
                self.warnings.push(w);
            }
        }
    }

    pub fn counts(&self) -> Counts {
        let exploratory = self.checks.iter().filter(|c| c.exploratory).count();
        let passed = self.checks.iter().filter(|c| !c.exploratory && c.pass).count();
        Counts { total: self.checks.len(), passed, failed: self.checks.len() - exploratory - passed, exploratory }
    }

    /// Any non-exploratory failure.
    pub fn failed(&self) -> bool {
        self.counts().failed > 0
    }

    pub fn check(&self, id: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.id == id)
    }

    pub fn summary(&self) -> Summary {
        Summary {
            suite: self.suite.clone(),
            seed: self.seed,
            warnings: self.warnings.clone(),
            checks: self.checks.clone(),
            fits: self.curves.iter().map(CurveFit::from).collect(),
            counts: self.counts(),
        }
    }
}

pub fn curves_csv(curves: &[NormCurve]) -> String {
    let mut s = String::from(CURVES_HEADER);
    s.push('\n');
    for c in curves {
        for &(t, v) in &c.samples {
            let _ = writeln!(s, "{},{},{},{},{},{},{}", c.quantity.tag(), c.region, c.m, c.c1, c.c2, t, v);
        }
    }
    s
}

pub fn summary_json(report: &VerificationReport) -> String {
    let mut s = serde_json::to_string_pretty(&report.summary()).expect("summary serialises");
    s.push('\n');
    s
}

pub fn parse_summary(text: &str) -> Result<Summary> {
    serde_json::from_str(text).map_err(|e| Error::Internal(format!("summary does not parse: {e}")))
}

fn opt(x: Option<f64>) -> String {
    x.map_or("-".into(), |v| format!("{v:.4e}"))
}

pub fn table(report: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "suite {}  seed {}", report.suite, report.seed);
    for w in &report.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    let _ = writeln!(
        s,
        "{:<44} {:<8} {:>14} {:>14} {:>10} {:>9}  {}",
        "check", "verdict", "predicted", "measured", "tol", "time[s]", "claim"
    );
    for c in &report.checks {
        let verdict = if c.exploratory {
            "info"
        } else if c.pass {
            "PASS"
        } else {
            "FAIL"
        };
        let time = report.runtimes.iter().find(|r| r.0 == c.id).map_or("-".into(), |r| format!("{:.2}", r.1));
        let _ = writeln!(
            s,
            "{:<44} {:<8} {:>14} {:>14} {:>10} {:>9}  {}",
            c.id,
            verdict,
            opt(c.predicted),
            opt(c.measured),
            opt(c.tolerance),
            time,
            c.anchor
        );
        if !c.detail.is_empty() {
            let _ = writeln!(s, "    {}", c.detail);
        }
    }
    let k = report.counts();
    let _ = writeln!(s, "{} checks: {} passed, {} failed, {} exploratory", k.total, k.passed, k.failed, k.exploratory);
    s
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf> {
    fs::write(&path, text).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(path)
}

/// Writes the curves file, the summary and the table into `dir`.
pub fn emit_reports(report: &VerificationReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.display().to_string(), source })?;
    Ok(vec![
        write(dir.join(CURVES_FILE), &curves_csv(&report.curves))?,
        write(dir.join(SUMMARY_FILE), &summary_json(report))?,
        write(dir.join(TABLE_FILE), &table(report))?,
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotics::regions::Quantity;

    fn curve(n: usize) -> NormCurve {
        NormCurve {
            quantity: Quantity::EpsL1P,
            region: "P".into(),
            m: 2,
            c1: 0.5,
            c2: 0.3,
            samples: (0..n).map(|k| (2f64.powi(-(k as i32) - 4), 0.1 * k as f64)).collect(),
            fitted_exponent: f64::NAN,
            log_corrected: false,
            log_power: 0.0,
            predicted_exponent: Some(1.5),
            bound_kind: BoundKind::EqualityOrder,
            r_squared: 0.99,
            zeros: 1,
        }
    }

    #[test]
    fn empty_report_has_header_only() {
        assert_eq!(curves_csv(&[]), format!("{CURVES_HEADER}\n"));
    }

    #[test]
    fn one_row_per_sample() {
        let s = curves_csv(&[curve(13)]);
        assert_eq!(s.lines().count(), 14);
        assert!(s.lines().nth(1).unwrap().starts_with("epsL1_P,P,2,0.5,0.3,0.0625,0"));
    }

    #[test]
    fn summary_round_trips() {
        let mut r = VerificationReport::new("phase-norms", 7);
        r.push(CheckRecord::new("a", "claim a").predicted(1.0).measured(f64::INFINITY).pass(true));
        r.push(CheckRecord::new("b", "x").exploratory());
        r.curves.push(curve(3));
        r.runtimes.push(("a".into(), 123.25));
        let back = parse_summary(&summary_json(&r)).unwrap();
        assert_eq!(back, r.summary());
        assert_eq!(back.counts, Counts { total: 2, passed: 1, failed: 0, exploratory: 1 });
        assert!(!summary_json(&r).contains("123.25"));
        assert!(table(&r).contains("123.25"));
    }

    #[test]
    fn emits_three_files() {
        let dir = tempfile::tempdir().unwrap();
        let files = emit_reports(&VerificationReport::new("x", 1), dir.path()).unwrap();
        assert_eq!(files.len(), 3);
        assert!(table(&VerificationReport::new("x", 1)).contains("0 checks"));
    }
}
