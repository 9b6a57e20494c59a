//! Prints one PASS/FAIL line per acceptance criterion, then fails on any
//! failing check outside the known unattainable ones.

use std::process::ExitCode;

use wmp_testkit::acceptance::{run_criterion, KNOWN_UNATTAINABLE};

fn main() -> ExitCode {
    let mut unexpected = Vec::new();
    for id in 1..=10 {
        let c = run_criterion(id);
        println!("{c}");
        for check in &c.checks {
            if !check.pass && !KNOWN_UNATTAINABLE.contains(&check.name.as_str()) {
                unexpected.push(format!("criterion {id}: {}", check.name));
            }
        }
    }
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        eprintln!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
