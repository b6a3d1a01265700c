//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria run sequentially inside a single test so the large grids never
//! share memory. A criterion line reads FAIL when any of its rows fails.
//! The test itself fails only on rows outside [`KNOWN_FAILURES`]: each of
//! those is a statement whose literal form is false or unattainable, and
//! is asserted to fail in the specific way analysed for it.

use dirac_beltrami::gridfield::GridSpec;
use harness::config::DEFAULT_SEED;
use harness::experiments::{self, HolderParams};
use harness::report::{is_literal_check, ReportRow};
use harness::suites;
use std::io::Write;
use std::time::Instant;

/// `experiment/check` keys allowed to fail, with the reason printed next to them.
const KNOWN_FAILURES: [(&str, &str); 5] = [
    ("algebra/hodge-double-star-literal", "double star is ŵ only in even dimension"),
    ("algebra/hodge-pairing-literal", "pairing picks up (-1)^{k(n-k)}"),
    ("operators/factorization-literal", "literal factorization equals -S"),
    ("operators/star-dirac-literal", "star conjugation of D+ carries a minus sign"),
    ("cauchy-ball/l2-ratio", "L2 error converges faster than first order"),
];

/// Write a report line to stderr directly, past the test harness's output
/// capture, so the criterion lines appear in a plain `cargo test` log.
fn say(line: String) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn known_failure(r: &ReportRow) -> Option<&'static str> {
    let key = format!("{}/{}", r.experiment, r.check);
    KNOWN_FAILURES.iter().find(|(k, _)| *k == key).map(|(_, why)| *why)
}

struct Criterion {
    number: usize,
    title: &'static str,
    rows: Vec<ReportRow>,
}

impl Criterion {
    fn print(&self) {
        let failed: Vec<&ReportRow> = self.rows.iter().filter(|r| !r.pass).collect();
        let status = if failed.is_empty() && !self.rows.is_empty() { "PASS" } else { "FAIL" };
        let mut line = format!("criterion {}: {status} {} ({} rows", self.number, self.title, self.rows.len());
        if !failed.is_empty() {
            let names: Vec<String> =
                failed.iter().map(|r| format!("{}/{} [{}]", r.experiment, r.check, r.params)).collect();
            line.push_str(&format!(", failing: {}", names.join(", ")));
        }
        line.push(')');
        say(line);
        for r in &self.rows {
            let tag = match (r.pass, known_failure(r)) {
                (false, Some(why)) => format!("  [known: {why}]"),
                _ => String::new(),
            };
            say(format!("    {}{tag}", r.line()));
        }
    }

    fn unexpected_failures(&self) -> Vec<String> {
        self.rows.iter().filter(|r| !r.pass && known_failure(r).is_none()).map(|r| r.line()).collect()
    }
}

fn timed(experiment: &str, limit_s: f64, run: impl FnOnce() -> Vec<ReportRow>) -> Vec<ReportRow> {
    let t = Instant::now();
    let mut rows = run();
    let secs = t.elapsed().as_secs_f64();
    rows.push(ReportRow::new(
        experiment,
        "runtime-seconds",
        "",
        secs,
        harness::report::Bound::AtMost(limit_s),
        DEFAULT_SEED,
    ));
    rows
}

fn grid(n: usize, points: usize, box_length: f64) -> GridSpec {
    GridSpec::new(n, points, box_length).expect("valid grid")
}

#[test]
fn acceptance() {
    let seed = DEFAULT_SEED;
    let mut criteria = Vec::new();
    let mut run = |number: usize, title: &'static str, rows: Vec<ReportRow>| {
        let c = Criterion { number, title, rows };
        c.print();
        criteria.push(c);
    };

    run(
        1,
        "algebra identities, 10^4 cases per identity, n = 2..6, 1e-10",
        timed("algebra", 120.0, || suites::algebra_suite(&[2, 3, 4, 5, 6], 10_000, seed)),
    );
    run(
        2,
        "operator identities on n=2 N=256 and n=3 N=64, 1e-9",
        timed("operators", 300.0, || {
            let mut rows = suites::operator_suite(grid(2, 256, 1.0), seed).expect("n=2 operator suite");
            rows.extend(suites::operator_suite(grid(3, 64, 1.0), seed).expect("n=3 operator suite"));
            rows
        }),
    );
    run(3, "Cauchy transform of the unit ball, n=3, 4^3 box", experiments::cauchy_ball(&[32, 64, 128], seed));
    run(
        4,
        "manufactured linear solves, M in {0.1, 0.3, 0.6}, n in {2, 3}",
        experiments::manufactured_sweep(&[grid(2, 64, 1.0), grid(3, 32, 1.0)], &[0.1, 0.3, 0.6], seed),
    );
    run(
        5,
        "second-order loop, constant and smooth SPD coefficients",
        experiments::second_order_sweep(&[(grid(2, 256, 1.0), true), (grid(3, 32, 1.0), false)], seed),
    );
    run(
        6,
        "nonlinear solver, saturated k = 0.5",
        experiments::nonlinear_sweep(&[grid(2, 64, 1.0), grid(3, 32, 1.0)], 0.5, seed),
    );
    run(7, "Hölder exponent of the free-space transform, p = 2n", experiments::holder(HolderParams::default(), seed));
    run(8, "Caccioppoli ratio, n=3, M=0.2, p=2.5", experiments::meyers(&[32, 64, 128], 0.2, 2.5, seed));
    run(9, "localization recursion, n=2", experiments::localization(&[64, 128, 256], 0.2, seed));
    run(10, "critical exponent and Sobolev iteration", experiments::exponents(seed));
    say("supplementary: Hodge duality of self-dual equations".to_string());
    for r in experiments::duality(64, 32, seed) {
        say(format!("    {}", r.line()));
        assert!(r.pass, "{}", r.line());
    }

    let unexpected: Vec<String> = criteria.iter().flat_map(|c| c.unexpected_failures()).collect();
    assert!(unexpected.is_empty(), "unexpected failures:\n{}", unexpected.join("\n"));

    let known: Vec<&ReportRow> =
        criteria.iter().flat_map(|c| c.rows.iter()).filter(|r| !r.pass && known_failure(r).is_some()).collect();
    for r in &known {
        if r.experiment == "operators" {
            assert!((r.measured - 2.0).abs() < 1e-6, "sign flip expected: {}", r.line());
        }
        if r.experiment == "cauchy-ball" {
            assert!(r.measured > 2.6, "ratio above the window expected: {}", r.line());
        }
        if r.experiment == "algebra" {
            assert!(is_literal_check(&r.check));
        }
    }
    for c in &criteria {
        let corrected_ok =
            c.rows.iter().filter(|r| !is_literal_check(&r.check)).all(|r| r.pass || known_failure(r).is_some());
        assert!(corrected_ok, "criterion {} has failing corrected rows", c.number);
    }
}
