//! The twelve acceptance criteria, one test each, run at their default
//! sizes with a fixed seed.
//!
//! Criteria run one at a time (they share the chamber cache and their time
//! budgets assume the machine to themselves). Each prints a single
//! `criterion N <suite>: PASS|FAIL` line straight to stdout, past the test
//! harness' capture.

use std::io::Write;
use std::sync::Mutex;
use std::time::{Duration, Instant};

use qmoduli::exec::Exec;
use qmoduli::verify::{run_suite, Bounds, Suite};

const SEED: u64 = 1;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(number: usize, suite: Suite, budget_secs: u64) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let report = run_suite(suite, SEED, Bounds::default(), Exec::default());
    let elapsed = start.elapsed();
    let in_time = elapsed <= Duration::from_secs(budget_secs);
    let passed = report.passed && in_time;
    let cases: u64 = report.properties.iter().map(|p| p.cases).sum();
    let failing: Vec<&str> = report
        .properties
        .iter()
        .filter(|p| !p.passed)
        .map(|p| p.property.as_str())
        .collect();
    let mut line = format!(
        "criterion {number:>2} {suite}: {} ({cases} cases, {:.1}s of {budget_secs}s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    if !failing.is_empty() {
        line.push_str(&format!(" failing: {}", failing.join(", ")));
    }
    if !in_time {
        line.push_str(" over time budget");
    }
    let _ = writeln!(std::io::stdout().lock(), "{line}");
    assert!(
        passed,
        "{line}\n{}",
        serde_json::to_string_pretty(&report).unwrap()
    );
}

#[test]
fn criterion_01_stability_oracle() {
    criterion(1, Suite::StabilityOracle, 120);
}

#[test]
fn criterion_02_theta_polytope() {
    criterion(2, Suite::ThetaPolytope, 30);
}

#[test]
fn criterion_03_chambers_vs_grid() {
    criterion(3, Suite::ChambersVsGrid, 180);
}

#[test]
fn criterion_04_chart_stability() {
    criterion(4, Suite::ChartStability, 30);
}

#[test]
fn criterion_05_roundtrip_gk() {
    criterion(5, Suite::RoundtripGk, 300);
}

#[test]
fn criterion_06_roundtrip_lm() {
    criterion(6, Suite::RoundtripLm, 120);
}

#[test]
fn criterion_07_roundtrip_hassett() {
    criterion(7, Suite::RoundtripHassett, 300);
}

#[test]
fn criterion_08_hassett_special() {
    criterion(8, Suite::HassettSpecial, 120);
}

#[test]
fn criterion_09_qn2_pn() {
    criterion(9, Suite::Qn2Pn, 60);
}

#[test]
fn criterion_10_limit_equations() {
    criterion(10, Suite::LimitEquations, 180);
}

#[test]
fn criterion_11_five_term() {
    criterion(11, Suite::FiveTerm, 30);
}

#[test]
fn criterion_12_covering() {
    criterion(12, Suite::Covering, 180);
}
