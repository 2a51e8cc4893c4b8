//! The first-order language of rings: parsing, printing, the reference
//! evaluator and the compiled evaluator side by side.
//!
//! Run with: `cargo run --release --example formula_eval`

use honda_verify::folang::compile::compile;
use honda_verify::folang::eval::eval_naive;
use honda_verify::folang::parse::parse;
use honda_verify::folang::print::print;
use honda_verify::folang::Assignment;
use honda_verify::ring::ResidueRing;

fn main() {
    let sources = [
        "forall X. exists Y. Y*Y = X",
        "forall X. exists Y. exists Z. X = Y^2 + Z^2 + 2",
        "forall X. !(X = 0) -> exists Y. X*Y = 1",
        "exists X. !(X = 0) & X*X = 0",
    ];
    print!("{:<44}", "sentence");
    for m in 2..=9u64 {
        print!(" Z/{m}");
    }
    println!();
    for src in sources {
        let f = parse(src).expect("corpus sentences parse");
        assert_eq!(parse(&print(&f)).unwrap(), f, "printer round-trips");
        print!("{src:<44}");
        for m in 2..=9 {
            let ring = ResidueRing::new(m).unwrap();
            let naive = eval_naive(&f, &ring, &Assignment::new()).unwrap();
            let compiled = compile(&f, &ring).eval(&Assignment::new()).unwrap();
            assert_eq!(naive, compiled, "evaluators agree");
            print!(" {:>3}", if naive { "T" } else { "F" });
        }
        println!();
    }
    println!("\n(reference and compiled evaluators agreed on every cell)");
}
