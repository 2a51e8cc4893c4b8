//! Honda-property sweep over the built-in corpus: for every commutator
//! `gamma` and every generator `delta` of `<gamma>`, verify that `delta` is
//! a commutator.
//!
//! Run with: `cargo run --release --example honda_sweep`

use honda_verify::cli::corpus::builtin_entries;
use honda_verify::matgroup::DEFAULT_CLOSURE_CAP;

fn main() {
    println!("{:<10} {:>6} {:>12} {:>12}  verdict", "group", "order", "commutators", "pairs");
    for entry in builtin_entries() {
        let table = entry.realize(DEFAULT_CLOSURE_CAP).expect("corpus entries realize");
        let report = table.check_honda();
        println!(
            "{:<10} {:>6} {:>12} {:>12}  {}",
            entry.name,
            report.group_order,
            report.commutator_count,
            report.pairs_checked,
            if report.pass { "pass" } else { "FAIL" }
        );
        if let Some((gamma, delta)) = report.counterexample {
            println!("  counterexample: gamma = {gamma}, delta = {delta}");
        }
    }
}
