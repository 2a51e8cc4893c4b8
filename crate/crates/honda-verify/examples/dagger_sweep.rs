//! Exhaustive parameter-space sweeps over F_2 with n=2, r=1: semantic
//! evaluation of the sentence, the subgroup-by-subgroup criterion check,
//! and the dual-evaluator guard comparison.
//!
//! Run with: `cargo run --release --example dagger_sweep`

use std::time::Instant;

use honda_verify::definable::sweep::{dagger_check, dual_guard_sweep, eval_psi_semantic, SweepMode};
use honda_verify::definable::PsiParams;
use honda_verify::ring::ResidueRing;

fn main() {
    let f2 = ResidueRing::new(2).unwrap();

    for (s, t) in [(1i64, 1i64), (2, 1), (-1, -1)] {
        let params = PsiParams::new(2, s, t, 1).unwrap();
        let start = Instant::now();
        let eval = eval_psi_semantic(f2, &params, SweepMode::Exhaustive).unwrap();
        let dagger = dagger_check(f2, &params, SweepMode::Exhaustive).unwrap();
        println!(
            "s={s:>2} t={t:>2}: psi {} | criterion {} | {} tuples, {} guarded subgroups, {:.1}s",
            eval.truth,
            dagger.pass,
            eval.alphas_visited,
            eval.distinct_guarded_subgroups,
            start.elapsed().as_secs_f64()
        );
        assert_eq!(eval.truth, dagger.pass);
    }

    // Guard formula vs semantic mirror on a seeded sample (the acceptance
    // suite runs the full 2^25 comparison).
    let start = Instant::now();
    let dual = dual_guard_sweep(
        f2,
        2,
        1,
        SweepMode::Sampled {
            seed: 1,
            count: 100_000,
        },
    )
    .unwrap();
    println!(
        "dual guard check: {} tuples, {} disagreements, {:.1}s",
        dual.checked,
        dual.disagreements,
        start.elapsed().as_secs_f64()
    );
}
