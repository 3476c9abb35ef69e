//! Acceptance criteria, one test per criterion. Each prints a PASS/FAIL line
//! (visible with `--nocapture`) and fails on any failing case, a short case
//! count or an exceeded time bound.

use std::time::{Duration, Instant};

use wildkit::suite::{run_suite, SuiteParams, SuiteReport};

struct Criterion {
    suite: &'static str,
    cases: usize,
    time_bound: Duration,
}

const CRITERIA: &[Criterion] = &[
    Criterion { suite: "gp-invariants", cases: 200, time_bound: Duration::from_secs(5) },
    Criterion { suite: "njk1-exhaustive-gf3", cases: 81, time_bound: Duration::from_secs(30) },
    Criterion { suite: "njk-exhaustive-gf3", cases: 81, time_bound: Duration::from_secs(600) },
    Criterion { suite: "rank-laws", cases: 200, time_bound: Duration::from_secs(10) },
    Criterion { suite: "full-chain", cases: 50, time_bound: Duration::from_secs(60) },
    Criterion { suite: "thm2-roundtrip", cases: 100, time_bound: Duration::from_secs(60) },
    Criterion { suite: "simdecide-oracle", cases: 50, time_bound: Duration::from_secs(5) },
    Criterion { suite: "nonsingular-detection", cases: 2, time_bound: Duration::from_secs(5) },
];

fn evaluate(c: &Criterion, report: &SuiteReport, elapsed: Duration) -> Result<(), String> {
    if !report.failures.is_empty() {
        let first = &report.failures[0];
        return Err(format!(
            "{} of {} cases failed; first: case {} ({}) on {}",
            report.failures.len(),
            report.cases_run,
            first.case,
            first.reason,
            first.input
        ));
    }
    if report.cases_run < c.cases {
        return Err(format!("ran {} cases, expected {}", report.cases_run, c.cases));
    }
    if elapsed > c.time_bound {
        return Err(format!("took {elapsed:?}, bound {:?}", c.time_bound));
    }
    Ok(())
}

fn run(index: usize) {
    let c = &CRITERIA[index];
    let start = Instant::now();
    let outcome = run_suite(c.suite, &SuiteParams::default())
        .map_err(|e| e.to_string())
        .and_then(|r| evaluate(c, &r, start.elapsed()).map(|()| r));
    let elapsed = start.elapsed();
    match outcome {
        Ok(r) => println!(
            "PASS {}: {} ({}/{} cases, {:.2}s)",
            index + 1,
            c.suite,
            r.cases_passed,
            r.cases_run,
            elapsed.as_secs_f64()
        ),
        Err(why) => {
            println!("FAIL {}: {} ({why})", index + 1, c.suite);
            panic!("criterion {} ({}) failed: {why}", index + 1, c.suite);
        }
    }
}

#[test]
fn criterion_1_gp_invariants() {
    run(0);
}

#[test]
fn criterion_2_njk1_exhaustive_gf3() {
    run(1);
}

#[test]
fn criterion_3_njk_exhaustive_gf3() {
    run(2);
}

#[test]
fn criterion_4_rank_laws() {
    run(3);
}

#[test]
fn criterion_5_full_chain() {
    run(4);
}

#[test]
fn criterion_6_thm2_roundtrip() {
    run(5);
}

#[test]
fn criterion_7_simdecide_oracle() {
    run(6);
}

#[test]
fn criterion_8_nonsingular_detection() {
    run(7);
}
