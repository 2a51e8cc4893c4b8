//! Congruence-tower witness lifting: build SL_2(Z/2) <- SL_2(Z/4) <-
//! SL_2(Z/8), verify every level, and lift a commutator witness for every
//! qualifying top-level target through the reduction fibers.
//!
//! Run with: `cargo run --release --example witness_lifting`

use honda_verify::tower::{check_reductions, lift_all_cyclic_targets, Tower};

fn main() {
    for (p, levels) in [(2u64, 3usize), (3, 2)] {
        let tower = Tower::build(p, 2, levels).unwrap();
        let sizes: Vec<usize> = (1..=tower.depth()).map(|k| tower.level(k).order()).collect();
        println!("tower p={p}, {levels} levels: sizes {sizes:?}");

        for k in 1..=tower.depth() {
            let honda = tower.level_honda(k);
            println!("  level {k}: order {:>4}, honda {}", honda.group_order,
                if honda.pass { "pass" } else { "FAIL" });
        }

        let reductions = check_reductions(&tower, 2048);
        println!(
            "  reductions: surjective={} constant_fibers={} (size {}) homomorphism={}",
            reductions.surjective, reductions.constant_fibers, reductions.fiber_size,
            reductions.homomorphism_ok
        );

        let batch = lift_all_cyclic_targets(&tower);
        println!(
            "  lifted {}/{} targets, {} backtracks total",
            batch.lifted, batch.targets, batch.total_backtracks
        );
        assert!(batch.failures.is_empty());
        for trace in batch.traces.iter().take(2) {
            assert!(trace.verify());
            println!("  trace for top-level element #{}:", trace.delta_top);
            for level in &trace.levels {
                println!(
                    "    mod {:>2}: [{}, {}] = {}",
                    level.modulus, level.sigma, level.tau, level.delta
                );
            }
        }
    }
}
