//! The first-order language of rings: signature `{+, *, 0, 1, =}` with the
//! usual connectives and quantifiers ranging over a finite residue ring.
//!
//! There is deliberately no subtraction symbol and no negative literal;
//! polynomials that would need them are written by moving terms across `=`.
//! Integer literals `>= 2` and powers `^k` exist only as parser sugar and
//! desugar to repeated `1 + ... + 1` and repeated multiplication.
//!
//! Two evaluators are provided: a structurally recursive reference evaluator
//! ([`eval::eval_naive`]) and a compiled flat-bytecode evaluator
//! ([`compile::compile`]) whose defining contract is agreement with the
//! reference on every covering assignment.

pub mod compile;
pub mod eval;
pub mod parse;
pub mod print;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::RwLock;

use once_cell::sync::Lazy;

use crate::ring::{ResidueRing, RingElement};

/// An interned variable name. Interning is global and append-only; the id is
/// stable for the lifetime of the process, so formulas built independently
/// compare structurally by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sym(u32);

struct Interner {
    map: HashMap<&'static str, u32>,
    names: Vec<&'static str>,
}

static INTERNER: Lazy<RwLock<Interner>> = Lazy::new(|| {
    RwLock::new(Interner {
        map: HashMap::new(),
        names: Vec::new(),
    })
});

impl Sym {
    pub fn intern(name: &str) -> Sym {
        {
            let interner = INTERNER.read().unwrap();
            if let Some(&id) = interner.map.get(name) {
                return Sym(id);
            }
        }
        let mut interner = INTERNER.write().unwrap();
        if let Some(&id) = interner.map.get(name) {
            return Sym(id);
        }
        let leaked: &'static str = Box::leak(name.to_owned().into_boxed_str());
        let id = interner.names.len() as u32;
        interner.names.push(leaked);
        interner.map.insert(leaked, id);
        Sym(id)
    }

    pub fn name(self) -> &'static str {
        INTERNER.read().unwrap().names[self.0 as usize]
    }

    pub fn id(self) -> u32 {
        self.0
    }
}

impl std::fmt::Display for Sym {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A term over the ring signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Var(Sym),
    Zero,
    One,
    Add(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(Sym::intern(name))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    /// The numeral `k` as `1 + 1 + ... + 1` (left-folded); `0` is `Zero`.
    pub fn literal(k: u64) -> Term {
        match k {
            0 => Term::Zero,
            _ => {
                let mut t = Term::One;
                for _ in 1..k {
                    t = Term::add(t, Term::One);
                }
                t
            }
        }
    }

    /// `base^k` as repeated multiplication (left-folded); `base^0` is `One`.
    pub fn power(base: Term, k: u64) -> Term {
        match k {
            0 => Term::One,
            _ => {
                let mut t = base.clone();
                for _ in 1..k {
                    t = Term::mul(t, base.clone());
                }
                t
            }
        }
    }

    /// Sum of a non-empty list, left-folded; the empty sum is `Zero`.
    pub fn sum(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut it = terms.into_iter();
        match it.next() {
            None => Term::Zero,
            Some(first) => it.fold(first, Term::add),
        }
    }

    fn collect_vars(&self, out: &mut BTreeSet<Sym>) {
        match self {
            Term::Var(x) => {
                out.insert(*x);
            }
            Term::Zero | Term::One => {}
            Term::Add(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn subst(&self, target: Sym, replacement: &Term) -> Term {
        match self {
            Term::Var(x) if *x == target => replacement.clone(),
            Term::Var(_) | Term::Zero | Term::One => self.clone(),
            Term::Add(a, b) => Term::add(a.subst(target, replacement), b.subst(target, replacement)),
            Term::Mul(a, b) => Term::mul(a.subst(target, replacement), b.subst(target, replacement)),
        }
    }
}

/// A formula over the ring signature.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    ForAll(Sym, Box<Formula>),
    Exists(Sym, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn forall(x: Sym, f: Formula) -> Formula {
        Formula::ForAll(x, Box::new(f))
    }

    pub fn exists(x: Sym, f: Formula) -> Formula {
        Formula::Exists(x, Box::new(f))
    }

    /// Conjunction of a non-empty list, left-folded. The empty conjunction is
    /// the vacuous truth `0 = 0`.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Formula {
        let mut it = fs.into_iter();
        match it.next() {
            None => Formula::eq(Term::Zero, Term::Zero),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    pub fn forall_all(vars: impl IntoIterator<Item = Sym>, body: Formula) -> Formula {
        let vars: Vec<Sym> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |f, x| Formula::forall(x, f))
    }

    pub fn exists_all(vars: impl IntoIterator<Item = Sym>, body: Formula) -> Formula {
        let vars: Vec<Sym> = vars.into_iter().collect();
        vars.into_iter().rev().fold(body, |f, x| Formula::exists(x, f))
    }

    fn collect_free(&self, bound: &mut Vec<Sym>, out: &mut BTreeSet<Sym>) {
        match self {
            Formula::Eq(a, b) => {
                for x in a.vars().union(&b.vars()) {
                    if !bound.contains(x) {
                        out.insert(*x);
                    }
                }
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::ForAll(x, f) | Formula::Exists(x, f) => {
                bound.push(*x);
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// The exact set of free variables.
    pub fn free_vars(&self) -> BTreeSet<Sym> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    /// A sentence is a formula with no free variables.
    pub fn is_sentence(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Capture-free substitution of a term for every free occurrence of
    /// `target`. Binders that would capture a variable of the replacement are
    /// renamed apart first.
    pub fn substitute(&self, target: Sym, replacement: &Term) -> Formula {
        let replacement_vars = replacement.vars();
        self.subst_inner(target, replacement, &replacement_vars)
    }

    fn subst_inner(&self, target: Sym, replacement: &Term, rvars: &BTreeSet<Sym>) -> Formula {
        match self {
            Formula::Eq(a, b) => Formula::eq(a.subst(target, replacement), b.subst(target, replacement)),
            Formula::Not(f) => Formula::not(f.subst_inner(target, replacement, rvars)),
            Formula::And(a, b) => Formula::and(
                a.subst_inner(target, replacement, rvars),
                b.subst_inner(target, replacement, rvars),
            ),
            Formula::Or(a, b) => Formula::or(
                a.subst_inner(target, replacement, rvars),
                b.subst_inner(target, replacement, rvars),
            ),
            Formula::Implies(a, b) => Formula::implies(
                a.subst_inner(target, replacement, rvars),
                b.subst_inner(target, replacement, rvars),
            ),
            Formula::ForAll(x, f) | Formula::Exists(x, f) => {
                let is_forall = matches!(self, Formula::ForAll(..));
                if *x == target {
                    // Shadowed: nothing to substitute below.
                    return self.clone();
                }
                let (x, f) = if rvars.contains(x) {
                    let fresh = fresh_sym(x.name(), &f.free_vars());
                    let renamed = f.subst_inner(*x, &Term::Var(fresh), &BTreeSet::from([fresh]));
                    (fresh, Box::new(renamed))
                } else {
                    (*x, f.clone())
                };
                let body = f.subst_inner(target, replacement, rvars);
                if is_forall {
                    Formula::forall(x, body)
                } else {
                    Formula::exists(x, body)
                }
            }
        }
    }

    /// Renames binders so that no variable is bound twice along any branch
    /// and no binder shadows a free variable. Evaluation is unchanged.
    pub fn rename_apart(&self) -> Formula {
        let mut used = self.free_vars();
        self.rename_inner(&mut used, &BTreeMap::new())
    }

    fn rename_inner(&self, used: &mut BTreeSet<Sym>, map: &BTreeMap<Sym, Sym>) -> Formula {
        match self {
            Formula::Eq(a, b) => {
                let mut ra = a.clone();
                let mut rb = b.clone();
                for (&from, &to) in map {
                    ra = ra.subst(from, &Term::Var(to));
                    rb = rb.subst(from, &Term::Var(to));
                }
                Formula::eq(ra, rb)
            }
            Formula::Not(f) => Formula::not(f.rename_inner(used, map)),
            Formula::And(a, b) => Formula::and(a.rename_inner(used, map), b.rename_inner(used, map)),
            Formula::Or(a, b) => Formula::or(a.rename_inner(used, map), b.rename_inner(used, map)),
            Formula::Implies(a, b) => {
                Formula::implies(a.rename_inner(used, map), b.rename_inner(used, map))
            }
            Formula::ForAll(x, f) | Formula::Exists(x, f) => {
                let new_x = if used.contains(x) {
                    fresh_sym(x.name(), used)
                } else {
                    *x
                };
                used.insert(new_x);
                let mut map = map.clone();
                map.insert(*x, new_x);
                let body = f.rename_inner(used, &map);
                if matches!(self, Formula::ForAll(..)) {
                    Formula::forall(new_x, body)
                } else {
                    Formula::exists(new_x, body)
                }
            }
        }
    }

    /// True when no variable is bound twice along one branch and no binder
    /// shadows another in scope.
    pub fn binders_unique(&self) -> bool {
        fn walk(f: &Formula, in_scope: &mut Vec<Sym>) -> bool {
            match f {
                Formula::Eq(..) => true,
                Formula::Not(g) => walk(g, in_scope),
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                    walk(a, in_scope) && walk(b, in_scope)
                }
                Formula::ForAll(x, g) | Formula::Exists(x, g) => {
                    if in_scope.contains(x) {
                        return false;
                    }
                    in_scope.push(*x);
                    let ok = walk(g, in_scope);
                    in_scope.pop();
                    ok
                }
            }
        }
        walk(self, &mut Vec::new())
    }
}

fn fresh_sym(base: &str, avoid: &BTreeSet<Sym>) -> Sym {
    for k in 0u64.. {
        let candidate = Sym::intern(&format!("{base}_{k}"));
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
    unreachable!()
}

/// A partial map from variables to ring elements, used to close the free
/// variables of a formula before evaluation.
#[derive(Debug, Clone, Default)]
pub struct Assignment {
    map: BTreeMap<Sym, RingElement>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn bind(mut self, name: &str, value: RingElement) -> Self {
        self.map.insert(Sym::intern(name), value);
        self
    }

    pub fn set(&mut self, sym: Sym, value: RingElement) {
        self.map.insert(sym, value);
    }

    pub fn get(&self, sym: Sym) -> Option<RingElement> {
        self.map.get(&sym).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Sym, &RingElement)> {
        self.map.iter()
    }

    /// Every bound value must live in the given ring.
    pub fn check_ring(&self, ring: &ResidueRing) -> bool {
        self.map.values().all(|v| v.ring() == *ring)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_vars_examples() {
        // (exists Y) Y*Y = X   has exactly X free.
        let f = parse::parse("exists Y. Y*Y = X").unwrap();
        let x = Sym::intern("X");
        assert_eq!(f.free_vars(), BTreeSet::from([x]));

        // (forall X)(exists Y)(exists Z) X = Y^2 + Z^2 + 2  is a sentence.
        let f = parse::parse("forall X. exists Y. exists Z. X = Y^2 + Z^2 + 2").unwrap();
        assert!(f.is_sentence());

        // X = X has X free.
        let f = parse::parse("X = X").unwrap();
        assert_eq!(f.free_vars(), BTreeSet::from([x]));
    }

    #[test]
    fn literal_and_power_desugar() {
        assert_eq!(Term::literal(0), Term::Zero);
        assert_eq!(Term::literal(1), Term::One);
        assert_eq!(
            Term::literal(3),
            Term::add(Term::add(Term::One, Term::One), Term::One)
        );
        let x = Term::var("X");
        assert_eq!(Term::power(x.clone(), 0), Term::One);
        assert_eq!(Term::power(x.clone(), 1), x.clone());
        assert_eq!(Term::power(x.clone(), 2), Term::mul(x.clone(), x));
    }

    #[test]
    fn substitution_shadowing() {
        // Substituting into a shadowed binder changes nothing.
        let f = parse::parse("forall X. X = Y").unwrap();
        let g = f.substitute(Sym::intern("X"), &Term::One);
        assert_eq!(f, g);
        // Free occurrences are replaced.
        let g = f.substitute(Sym::intern("Y"), &Term::One);
        assert_eq!(g, parse::parse("forall X. X = 1").unwrap());
    }

    #[test]
    fn substitution_avoids_capture() {
        // Substituting Y := X under a binder for X must rename the binder.
        let f = parse::parse("forall X. X + Y = 0").unwrap();
        let g = f.substitute(Sym::intern("Y"), &Term::var("X"));
        match &g {
            Formula::ForAll(x, body) => {
                assert_ne!(*x, Sym::intern("X"));
                let free = body.free_vars();
                assert!(free.contains(&Sym::intern("X")));
            }
            _ => panic!("expected a quantifier"),
        }
    }

    #[test]
    fn rename_apart_makes_binders_unique() {
        let f = parse::parse("(forall X. X = 0) & (forall X. X = 1)").unwrap();
        assert!(f.binders_unique()); // different branches are fine
        let g = parse::parse("forall X. forall X. X = 0").unwrap();
        assert!(!g.binders_unique());
        assert!(g.rename_apart().binders_unique());
    }
}
