//! Reference evaluator: structural recursion over the formula tree, with
//! quantifiers looping over the whole ring. Connectives short-circuit and
//! quantifier loops exit early, exactly like the compiled evaluator.

use thiserror::Error;

use super::{Assignment, Formula, Sym, Term};
use crate::ring::ResidueRing;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EvalError {
    #[error("free variable {0} is not covered by the assignment")]
    UnboundVariable(String),
    #[error("assignment value lives in a different ring than the evaluation ring Z/{0}")]
    WrongRing(u64),
}

/// Reusable evaluator for one formula over one ring. Slots are indexed by
/// interned symbol id, so repeated evaluation under varying assignments does
/// no hashing. Each instance owns its scratch space; concurrent evaluation
/// of one formula just uses one instance per thread.
pub struct NaiveEvaluator<'f> {
    formula: &'f Formula,
    modulus: u64,
    slots: Vec<u64>,
    free: Vec<Sym>,
    steps: u64,
}

impl<'f> NaiveEvaluator<'f> {
    pub fn new(formula: &'f Formula, ring: &ResidueRing) -> Self {
        let free: Vec<Sym> = formula.free_vars().into_iter().collect();
        let mut max_sym = 0u32;
        collect_max_sym(formula, &mut max_sym);
        NaiveEvaluator {
            formula,
            modulus: ring.modulus(),
            slots: vec![0; max_sym as usize + 2],
            free,
            steps: 0,
        }
    }

    pub fn free_vars(&self) -> &[Sym] {
        &self.free
    }

    /// Evaluates under the given assignment; errors if a free variable is
    /// uncovered or bound to a value from another ring.
    pub fn eval(&mut self, env: &Assignment) -> Result<bool, EvalError> {
        for &x in &self.free {
            match env.get(x) {
                Some(v) => {
                    if v.ring().modulus() != self.modulus {
                        return Err(EvalError::WrongRing(self.modulus));
                    }
                    self.slots[x.id() as usize] = v.value();
                }
                None => return Err(EvalError::UnboundVariable(x.name().to_owned())),
            }
        }
        Ok(self.run())
    }

    /// Hot-path entry: directly poke slot values for the given symbols, then
    /// evaluate. The caller is responsible for covering all free variables
    /// with canonical residues.
    pub fn eval_with_slots(&mut self, bindings: &[(Sym, u64)]) -> bool {
        for &(x, v) in bindings {
            self.slots[x.id() as usize] = v;
        }
        self.run()
    }

    /// Atom evaluations performed since construction.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    fn run(&mut self) -> bool {
        let formula = self.formula;
        eval_f(formula, self.modulus, &mut self.slots, &mut self.steps)
    }
}

fn collect_max_sym(f: &Formula, max: &mut u32) {
    fn term(t: &Term, max: &mut u32) {
        match t {
            Term::Var(x) => *max = (*max).max(x.id()),
            Term::Zero | Term::One => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                term(a, max);
                term(b, max);
            }
        }
    }
    match f {
        Formula::Eq(a, b) => {
            term(a, max);
            term(b, max);
        }
        Formula::Not(g) => collect_max_sym(g, max),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_max_sym(a, max);
            collect_max_sym(b, max);
        }
        Formula::ForAll(x, g) | Formula::Exists(x, g) => {
            *max = (*max).max(x.id());
            collect_max_sym(g, max);
        }
    }
}

fn eval_t(t: &Term, m: u64, slots: &[u64]) -> u64 {
    match t {
        Term::Var(x) => slots[x.id() as usize],
        Term::Zero => 0,
        Term::One => 1,
        Term::Add(a, b) => {
            let s = eval_t(a, m, slots) + eval_t(b, m, slots);
            if s >= m {
                s - m
            } else {
                s
            }
        }
        Term::Mul(a, b) => eval_t(a, m, slots) * eval_t(b, m, slots) % m,
    }
}

fn eval_f(f: &Formula, m: u64, slots: &mut Vec<u64>, steps: &mut u64) -> bool {
    match f {
        Formula::Eq(a, b) => {
            *steps += 1;
            eval_t(a, m, slots) == eval_t(b, m, slots)
        }
        Formula::Not(g) => !eval_f(g, m, slots, steps),
        Formula::And(a, b) => eval_f(a, m, slots, steps) && eval_f(b, m, slots, steps),
        Formula::Or(a, b) => eval_f(a, m, slots, steps) || eval_f(b, m, slots, steps),
        Formula::Implies(a, b) => !eval_f(a, m, slots, steps) || eval_f(b, m, slots, steps),
        Formula::ForAll(x, g) => {
            let idx = x.id() as usize;
            let saved = slots[idx];
            let mut result = true;
            for v in 0..m {
                slots[idx] = v;
                if !eval_f(g, m, slots, steps) {
                    result = false;
                    break;
                }
            }
            slots[idx] = saved;
            result
        }
        Formula::Exists(x, g) => {
            let idx = x.id() as usize;
            let saved = slots[idx];
            let mut result = false;
            for v in 0..m {
                slots[idx] = v;
                if eval_f(g, m, slots, steps) {
                    result = true;
                    break;
                }
            }
            slots[idx] = saved;
            result
        }
    }
}

/// One-shot convenience wrapper around [`NaiveEvaluator`].
pub fn eval_naive(f: &Formula, ring: &ResidueRing, env: &Assignment) -> Result<bool, EvalError> {
    NaiveEvaluator::new(f, ring).eval(env)
}

/// Like [`eval_naive`], also returning the number of atom evaluations.
pub fn eval_naive_counting(
    f: &Formula,
    ring: &ResidueRing,
    env: &Assignment,
) -> Result<(bool, u64), EvalError> {
    let mut e = NaiveEvaluator::new(f, ring);
    let result = e.eval(env)?;
    Ok((result, e.steps()))
}
