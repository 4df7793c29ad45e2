//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits nonzero when the set of failing criteria differs from
//! `EXPECTED_FAILURES` or a criterion overruns its time limit.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use schreier::acceptance::{criteria, run_criterion};

/// 2b asks for strictly increasing ranks of S_1 on {1..N}; the ranks are
/// 2,3,3,4,4,... (a new rank needs two more elements), so it cannot hold.
const EXPECTED_FAILURES: &[&str] = &["2b"];

fn limit(id: &str) -> Duration {
    match id {
        "1" => Duration::from_secs(120),
        "11" => Duration::from_secs(300),
        _ => Duration::from_secs(600),
    }
}

fn main() -> ExitCode {
    let seed = std::env::var("SCHREIER_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(0);
    let mut failed = Vec::new();
    let mut slow = Vec::new();
    for id in criteria("all").expect("suite exists") {
        let t = Instant::now();
        let o = run_criterion(id, seed);
        let dt = t.elapsed();
        println!(
            "{} [{}] {}: {} ({:.2}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.id,
            o.name,
            o.detail,
            dt.as_secs_f64()
        );
        if !o.passed {
            failed.push(o.id);
        }
        if dt > limit(id) {
            slow.push(o.id);
        }
    }
    println!("failing: {failed:?} (expected {EXPECTED_FAILURES:?}); over time: {slow:?}");
    if failed == EXPECTED_FAILURES && slow.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
