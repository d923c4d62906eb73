//! Reruns every published result and prints one PASS/FAIL line each.
//!
//! `area(D(P)) = 2 phase_area(P)` is checked exactly as stated and fails:
//! the same suite fixes the Quad's phase area at 19, and under that
//! normalization area(D(P)) equals phase_area(P). It is reported but does
//! not fail the run; every other line must pass.

use std::process::ExitCode;

use symbill_core::reproduce::{self, KNOWN_FAILURES};

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for (_, check) in reproduce::checks() {
        for r in check() {
            println!("{}", r.line());
            if r.passed {
                passed += 1;
            } else if !KNOWN_FAILURES.contains(&r.name.as_str()) {
                unexpected.push(r.name);
            }
        }
    }
    println!("{passed} passed");
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {}", unexpected.join(", "));
        ExitCode::FAILURE
    }
}
