//! Runs the ten acceptance checks and prints one line per check.
//!
//! ```text
//! cargo run --release --example validate            # full spectrum window
//! cargo run --release --example validate -- --quick
//! ```

use rabi_crwa::validation::run_all;

fn main() -> rabi_crwa::Result<()> {
    let quick = std::env::args().any(|a| a == "--quick");
    let report = run_all(quick)?;
    for c in &report.criteria {
        println!("{}", c.line());
    }
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!("{} of {} checks passed", report.criteria.len() - failed, report.criteria.len());
    Ok(())
}
