//! Building the definable-subgroup commutator sentence: the guard formulas
//! phi/chi/eta and the closed sentence, printed and size-profiled.
//!
//! Run with: `cargo run --release --example psi_sentence`

use honda_verify::definable::formulas::{build_eta, build_guard, build_psi};
use honda_verify::definable::{MonomialBasis, PsiParams};
use honda_verify::folang::print::print;

fn main() {
    // Dimension 1 is small enough to read in full.
    let basis = MonomialBasis::build(1, 1).unwrap();
    let params = PsiParams::new(1, 2, 1, 1).unwrap();
    println!("eta for n=1, r=1:\n  {}\n", print(&build_eta(&basis)));
    let psi = build_psi(&params, &basis);
    assert!(psi.is_sentence());
    println!("psi for n=1, r=1, s=2, t=1:\n  {}\n", print(&psi));

    // The production size: n=2, r=1 (the 2^25-tuple sweep family).
    let basis = MonomialBasis::build_low_degree(2, 1).unwrap();
    println!("n=2, r=1: c = {} monomials, {} parameters", basis.c(), basis.c() * basis.c());
    for (s, t) in [(1, 1), (3, 5), (-2, -1)] {
        let params = PsiParams::new(2, s, t, 1).unwrap();
        let psi = build_psi(&params, &basis);
        assert!(psi.is_sentence());
        let text = print(&psi);
        println!("  s={s:>2} t={t:>2}: sentence of {} bytes, guard of {} bytes",
            text.len(),
            print(&build_guard(&basis)).len());
    }
}
