//! Pretty-printer, inverse to the parser: `parse(print(f)) == f` for every
//! formula, byte-stable across runs.
//!
//! Output is fully desugared (no `^`, no literals above 1) with minimal
//! parentheses under the grammar's precedences.

use super::{Formula, Term};

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::Var(_) | Term::Zero | Term::One => 3,
        Term::Mul(..) => 2,
        Term::Add(..) => 1,
    }
}

fn print_term_into(t: &Term, min_prec: u8, out: &mut String) {
    let prec = term_prec(t);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match t {
        Term::Var(x) => out.push_str(x.name()),
        Term::Zero => out.push('0'),
        Term::One => out.push('1'),
        Term::Add(a, b) => {
            // Left-associative: the right child needs strictly higher
            // precedence to avoid re-association on the way back in.
            print_term_into(a, 1, out);
            out.push_str(" + ");
            print_term_into(b, 2, out);
        }
        Term::Mul(a, b) => {
            print_term_into(a, 2, out);
            out.push_str(" * ");
            print_term_into(b, 3, out);
        }
    }
    if parens {
        out.push(')');
    }
}

fn formula_prec(f: &Formula) -> u8 {
    match f {
        Formula::Implies(..) => 1,
        Formula::Or(..) => 2,
        Formula::And(..) => 3,
        Formula::Not(..) => 4,
        Formula::Eq(..) => 5,
        // Quantifier bodies extend maximally to the right, so a quantifier
        // in any operand position needs parentheses.
        Formula::ForAll(..) | Formula::Exists(..) => 0,
    }
}

fn print_formula_into(f: &Formula, min_prec: u8, out: &mut String) {
    let prec = formula_prec(f);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match f {
        Formula::Eq(a, b) => {
            print_term_into(a, 1, out);
            out.push_str(" = ");
            print_term_into(b, 1, out);
        }
        Formula::Not(g) => {
            out.push('!');
            print_formula_into(g, 4, out);
        }
        Formula::And(a, b) => {
            print_formula_into(a, 3, out);
            out.push_str(" & ");
            print_formula_into(b, 4, out);
        }
        Formula::Or(a, b) => {
            print_formula_into(a, 2, out);
            out.push_str(" | ");
            print_formula_into(b, 3, out);
        }
        Formula::Implies(a, b) => {
            // Right-associative.
            print_formula_into(a, 2, out);
            out.push_str(" -> ");
            print_formula_into(b, 1, out);
        }
        Formula::ForAll(x, g) => {
            out.push_str("forall ");
            out.push_str(x.name());
            out.push_str(". ");
            print_formula_into(g, 0, out);
        }
        Formula::Exists(x, g) => {
            out.push_str("exists ");
            out.push_str(x.name());
            out.push_str(". ");
            print_formula_into(g, 0, out);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print(f: &Formula) -> String {
    let mut out = String::new();
    print_formula_into(f, 0, &mut out);
    out
}

pub fn print_term(t: &Term) -> String {
    let mut out = String::new();
    print_term_into(t, 0, &mut out);
    out
}
