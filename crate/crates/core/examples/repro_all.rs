//! Runs every worked example and prints one line per entry.

use gtheta::repro::{repro_all, ReproVerdict};

fn main() -> gtheta::Result<()> {
    let trials = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10_000);
    let report = repro_all(trials, 0)?;
    for e in &report.entries {
        let tag = match e.verdict {
            ReproVerdict::Pass => "pass",
            ReproVerdict::Fail => "FAIL",
            ReproVerdict::Discrepancy => "disc",
        };
        println!("{tag} {:<28} {}", e.id, e.observed);
        if e.verdict != ReproVerdict::Pass {
            println!("     expected: {}", e.expected);
        }
    }
    println!("{} passed, {} failed, {} discrepancies", report.passed, report.failed, report.discrepancies);
    Ok(())
}
