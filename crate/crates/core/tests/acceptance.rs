//! One line per acceptance criterion, with the pinned tolerances from
//! `birkhoff::verify::tol`. Runs without the libtest harness so the table is
//! printed on every `cargo test`.

use std::process::ExitCode;

use birkhoff::par::Execution;
use birkhoff::verify::{run_criterion, CRITERIA};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for &(id, name, _) in CRITERIA.iter() {
        match run_criterion(id, Execution::default()) {
            Ok(r) => {
                println!(
                    "[{}] {:>2} {:<34} {:>7.2}s  {}",
                    if r.pass { "PASS" } else { "FAIL" },
                    r.id,
                    r.name,
                    r.seconds,
                    r.detail
                );
                if !r.pass {
                    failed.push(id);
                }
            }
            Err(e) => {
                println!("[FAIL] {id:>2} {name:<34}  error: {e}");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
