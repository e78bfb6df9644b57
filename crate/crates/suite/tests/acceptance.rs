//! Runs every acceptance check, prints one PASS/FAIL line each, and exits
//! non-zero if any failed. Bare arguments select checks by number.

use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let mut ran = 0;
    for (id, check) in masterfield_suite::all() {
        if !filter.is_empty() && !filter.iter().any(|f| *f == id.to_string()) {
            continue;
        }
        let outcome = check();
        ran += 1;
        println!("{outcome}");
        let _ = std::io::stdout().flush();
        if !outcome.passed() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
