//! Acceptance criteria, one line per criterion. All comparisons are exact
//! (tolerance 0); the only limits are the census wall-clock times quoted in
//! each line.

use keller_core::verify::{Suite, VerifyConfig};

fn main() {
    let suite = Suite::new(VerifyConfig::default());
    let mut failed = 0;
    for outcome in suite.run_all() {
        let status = if outcome.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {status} [{:.2}s] {}: {}", outcome.id, outcome.seconds, outcome.title, outcome.detail);
        failed += usize::from(!outcome.passed);
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
