//! Report rows, CSV/JSON output and aggregation.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

/// Schema line written as the first line of every CSV report.
pub const CSV_SCHEMA: &str = "# dirac-beltrami report schema 1";

pub const CODE_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Acceptance bound for a measured value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
    /// Informational measurement with no acceptance bound.
    Record,
}

impl Bound {
    pub fn holds(&self, x: f64) -> bool {
        match *self {
            Bound::AtMost(t) => x <= t,
            Bound::AtLeast(t) => x >= t,
            Bound::Within(lo, hi) => (lo..=hi).contains(&x),
            Bound::Record => true,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Bound::AtMost(t) => format!("<= {t:e}"),
            Bound::AtLeast(t) => format!(">= {t:e}"),
            Bound::Within(lo, hi) => format!("in [{lo}, {hi}]"),
            Bound::Record => "recorded".to_string(),
        }
    }
}

/// One measured quantity with its bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub experiment: String,
    pub check: String,
    pub params: String,
    pub measured: f64,
    pub bound: String,
    pub pass: bool,
    pub seed: u64,
    pub version: String,
    /// Counterexample or diagnostic detail; empty when there is none.
    pub note: String,
}

impl ReportRow {
    pub fn new(experiment: &str, check: &str, params: &str, measured: f64, bound: Bound, seed: u64) -> Self {
        ReportRow {
            experiment: experiment.to_string(),
            check: check.to_string(),
            params: params.to_string(),
            measured,
            bound: bound.describe(),
            pass: measured.is_finite() && bound.holds(measured),
            seed,
            version: CODE_VERSION.to_string(),
            note: String::new(),
        }
    }

    /// A row for a step that could not be carried out.
    pub fn failed(experiment: &str, check: &str, params: &str, seed: u64, why: impl ToString) -> Self {
        ReportRow {
            experiment: experiment.to_string(),
            check: check.to_string(),
            params: params.to_string(),
            measured: f64::NAN,
            bound: "n/a".to_string(),
            pass: false,
            seed,
            version: CODE_VERSION.to_string(),
            note: why.to_string(),
        }
    }

    pub fn with_note(mut self, note: impl ToString) -> Self {
        self.note = note.to_string();
        self
    }

    pub fn key(&self) -> (String, String, String) {
        (self.experiment.clone(), self.check.clone(), self.params.clone())
    }

    pub fn line(&self) -> String {
        let status = if self.pass { "PASS" } else { "FAIL" };
        let mut s = format!(
            "{status} {}/{} [{}] measured {:.6e} (bound {})",
            self.experiment, self.check, self.params, self.measured, self.bound
        );
        if !self.note.is_empty() {
            s.push_str(&format!(": {}", self.note));
        }
        s
    }
}

/// Checks of statements taken verbatim whose literal form is known to be
/// false; the corrected forms are checked under the names without suffix.
/// Their rows are reported but do not decide the exit status.
pub fn is_literal_check(check: &str) -> bool {
    check.ends_with("-literal")
}

pub fn all_pass(rows: &[ReportRow]) -> bool {
    rows.iter().all(|r| r.pass)
}

/// Every row that is not a literal-form reference row passes.
pub fn gating_pass(rows: &[ReportRow]) -> bool {
    rows.iter().filter(|r| !is_literal_check(&r.check)).all(|r| r.pass)
}

/// Write rows as CSV preceded by [`CSV_SCHEMA`].
pub fn write_csv(path: &Path, rows: &[ReportRow]) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut file = fs::File::create(path)?;
    writeln!(file, "{CSV_SCHEMA}")?;
    let mut w = csv::Writer::from_writer(file);
    for r in rows {
        w.serialize(r).map_err(std::io::Error::other)?;
    }
    w.flush()
}

pub fn read_csv(path: &Path) -> std::io::Result<Vec<ReportRow>> {
    let text = fs::read_to_string(path)?;
    let first = text.lines().next().unwrap_or("");
    if first != CSV_SCHEMA {
        return Err(std::io::Error::new(std::io::ErrorKind::InvalidData, format!("unexpected schema line {first:?}")));
    }
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
    r.deserialize().collect::<Result<Vec<ReportRow>, _>>().map_err(std::io::Error::other)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

/// Pass/fail counts over a set of report files.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Summary {
    pub files: usize,
    pub rows: usize,
    pub passed: usize,
    /// Failed rows, literal-form reference rows excluded.
    pub failed: usize,
    /// Failed literal-form reference rows.
    pub reference_failed: usize,
    pub duplicates: usize,
    /// Files that could not be read, with the reason.
    pub unreadable: Vec<(PathBuf, String)>,
    /// `experiment/check → all rows passed`.
    pub coverage: BTreeMap<String, bool>,
}

/// Aggregate every `*.csv` report in `dir`. Rows repeating an
/// `(experiment, check, params)` key are counted once.
pub fn summarize(dir: &Path) -> std::io::Result<Summary> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .collect();
    paths.sort();
    let mut summary = Summary::default();
    let mut seen = BTreeMap::new();
    for path in paths {
        match read_csv(&path) {
            Ok(rows) => {
                summary.files += 1;
                for row in rows {
                    if seen.insert(row.key(), (row.pass, is_literal_check(&row.check))).is_some() {
                        log::warn!(
                            "duplicate row {}/{} [{}] in {}",
                            row.experiment,
                            row.check,
                            row.params,
                            path.display()
                        );
                        summary.duplicates += 1;
                        continue;
                    }
                    let entry = summary.coverage.entry(format!("{}/{}", row.experiment, row.check)).or_insert(true);
                    *entry &= row.pass;
                }
            }
            Err(e) => summary.unreadable.push((path, e.to_string())),
        }
    }
    summary.rows = seen.len();
    summary.passed = seen.values().filter(|v| v.0).count();
    summary.reference_failed = seen.values().filter(|v| !v.0 && v.1).count();
    summary.failed = summary.rows - summary.passed - summary.reference_failed;
    Ok(summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(check: &str, measured: f64) -> ReportRow {
        ReportRow::new("suite", check, "n=2", measured, Bound::AtMost(1e-10), 7)
    }

    #[test]
    fn bounds() {
        assert!(Bound::Within(1.7, 2.6).holds(2.0));
        assert!(!Bound::Within(1.7, 2.6).holds(2.79));
        assert!(Bound::AtLeast(1.0).holds(1.0));
        assert!(!row("x", f64::NAN).pass);
    }

    #[test]
    fn csv_round_trip_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![row("a", 1e-12), row("b", 1.0)];
        write_csv(&dir.path().join("one.csv"), &rows).unwrap();
        write_csv(&dir.path().join("two.csv"), &rows[..1]).unwrap();
        fs::write(dir.path().join("bad.csv"), "garbage\n").unwrap();
        assert_eq!(read_csv(&dir.path().join("one.csv")).unwrap(), rows);
        let s = summarize(dir.path()).unwrap();
        assert_eq!((s.files, s.rows, s.passed, s.failed, s.duplicates), (2, 2, 1, 1, 1));
        assert_eq!(s.unreadable.len(), 1);
        assert_eq!(s.coverage.get("suite/a"), Some(&true));
        assert_eq!(s.coverage.get("suite/b"), Some(&false));
    }

    #[test]
    fn literal_rows_do_not_gate() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![row("a", 0.0), row("a-literal", 2.0)];
        write_csv(&dir.path().join("r.csv"), &rows).unwrap();
        let s = summarize(dir.path()).unwrap();
        assert_eq!((s.passed, s.failed, s.reference_failed), (1, 0, 1));
        assert!(gating_pass(&rows));
        assert!(!all_pass(&rows));
    }

    #[test]
    fn empty_directory_gives_empty_summary() {
        let dir = tempfile::tempdir().unwrap();
        assert_eq!(summarize(dir.path()).unwrap(), Summary::default());
    }

    #[test]
    fn csv_output_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let rows = vec![row("a", 0.1 + 0.2)];
        write_csv(&dir.path().join("a.csv"), &rows).unwrap();
        write_csv(&dir.path().join("b.csv"), &rows).unwrap();
        assert_eq!(fs::read(dir.path().join("a.csv")).unwrap(), fs::read(dir.path().join("b.csv")).unwrap());
    }
}
