//! The full preset suite with a per-experiment summary.

use singcov::verification::{paper_suite, SuiteReport};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(42);
    let report = SuiteReport::run("paper", &paper_suite(seed), seed)?;
    for r in &report.reports {
        let secs = r.timing.as_ref().map_or(0.0, |t| t.wall_seconds);
        println!("{} {:<26} {:<28} {secs:6.2}s", if r.passed() { "PASS" } else { "FAIL" }, r.name, r.model);
        for c in r.checks.iter().filter(|c| !c.passed) {
            println!("     {}: {:.4e} vs {:.4e} ({})", c.name, c.measured, c.tolerance, c.rule);
        }
    }
    println!("all passed: {}", report.passed());
    Ok(())
}
