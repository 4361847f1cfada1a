//! Acceptance suite: one line per criterion, non-zero exit on any failure.

use mlcontour::acceptance::{run_suite, Selection};

fn main() {
    let report = run_suite(&Selection::all());
    for r in &report.results {
        println!(
            "criterion {:>2} {}: {}: {}",
            r.id,
            if r.passed { "PASS" } else { "FAIL" },
            r.title,
            r.detail
        );
    }
    let passed = report.results.iter().filter(|r| r.passed).count();
    println!("{passed}/{} criteria passed", report.results.len());
    if !report.all_passed() {
        std::process::exit(1);
    }
}
