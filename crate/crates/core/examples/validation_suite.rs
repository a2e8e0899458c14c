//! Runs the closed-form checks that back the `validate` subcommand.
//!
//! Usage: `cargo run --release --example validation_suite`

use replichain::runner::validate::{run_checks, Oracles};

fn main() {
    let report = run_checks(&Oracles::default());
    for c in &report.checks {
        let verdict = if c.passed { "ok  " } else { "FAIL" };
        println!("[{verdict}] {:<28} deviation {:.2e} (tol {:.0e})  {}", c.name, c.deviation, c.tolerance, c.detail);
    }
    std::process::exit(if report.passed() { 0 } else { 1 });
}
