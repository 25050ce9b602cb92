//! Acceptance suite: runs every verification criterion at its pinned
//! tolerance and prints one pass/fail line per criterion.

use gonchar_core::config::Tolerances;
use gonchar_core::verify::{self, Level};

#[test]
fn acceptance_criteria() {
    let outcomes = verify::run(Level::Full, &Tolerances::default());
    let mut all_ok = true;
    for c in &outcomes {
        println!(
            "[{}] {:<45} {:>8.2}s  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.seconds,
            c.detail
        );
        all_ok &= c.passed;
    }
    assert!(all_ok, "acceptance criteria failed");
}
