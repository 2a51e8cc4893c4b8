//! Strong-Honda sweep: for every pair (a, b) of a group, the generators of
//! `<[a, b]>` must be commutators witnessed *inside* the subgroup `<a, b>`.
//!
//! Run with: `cargo run --release --example strong_honda`

use honda_verify::cli::corpus::{builtin_entries, find_entry};
use honda_verify::matgroup::DEFAULT_CLOSURE_CAP;

fn main() {
    let entries = builtin_entries();
    for name in ["sl2_f2", "sl2_f3"] {
        let table = find_entry(&entries, name)
            .unwrap()
            .realize(DEFAULT_CLOSURE_CAP)
            .unwrap();
        let order = table.order() as u32;
        let mut pass = 0u64;
        let mut certs = 0u64;
        for a in 0..order {
            for b in 0..order {
                let report = table.check_strong_honda(a, b).unwrap();
                assert!(report.pass, "{name}: pair ({a}, {b}) failed");
                pass += 1;
                certs += report.certs.len() as u64;
            }
        }
        println!("{name}: all {pass} generator pairs pass ({certs} witness certificates)");
    }

    // One certificate, spelled out.
    let table = find_entry(&entries, "sl2_f2")
        .unwrap()
        .realize(DEFAULT_CLOSURE_CAP)
        .unwrap();
    let report = table.check_strong_honda(1, 2).unwrap();
    println!("\nwitnesses for the generators of <[g1, g2]> in SL_2(F_2):");
    for cert in &report.certs {
        assert!(cert.verify());
        println!("  [{}, {}] = {}", cert.sigma, cert.tau, cert.target);
    }
}
