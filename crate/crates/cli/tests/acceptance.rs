//! Acceptance suite: one pass/fail line per criterion; exits nonzero if any
//! criterion fails.

use std::process::ExitCode;

fn main() -> ExitCode {
    // `cargo test` passes libtest flags such as --nocapture or filters;
    // listing requests get an empty list
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    // numeric arguments select criteria
    let selected: Vec<u8> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let results = if selected.is_empty() {
        abelkit::acceptance::run_all()
    } else {
        selected.iter().filter_map(|&n| abelkit::acceptance::run_one(n)).collect()
    };
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
