//! Runs the verification suite and prints the verdict.
//!
//!     cargo run --release --example verify_suite -- [fast|full]

use fracthin::experiment::{cmd_verify, VerifyLevel};

fn main() -> fracthin::Result<()> {
    let level = match std::env::args().nth(1).as_deref() {
        Some("full") => VerifyLevel::Full,
        _ => VerifyLevel::Fast,
    };
    let r = cmd_verify(level, 0, None)?;
    for c in &r.checks {
        println!(
            "{:<28} {:<4} error {:.3e} (tol {:.0e})",
            c.name,
            if c.passed { "ok" } else { "FAIL" },
            c.error,
            c.tolerance
        );
    }
    println!("passed: {}", r.passed);
    Ok(())
}
