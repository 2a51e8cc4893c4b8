//! Builders for the first-order formulas describing definable subgroups and
//! the closed subgroup-commutator sentence.
//!
//! Free variables `Z_a_b` (1-based, row-major) parameterize the constraint
//! polynomials. Matrix-valued conditions are encoded entrywise; inverses,
//! commutators and powers introduce auxiliary quantified matrix variables
//! pinned by product equations, so formula size grows linearly in `|s| + |t|`
//! and no subtraction symbol is ever needed.

use crate::folang::{Formula, Sym, Term};

use super::{MonomialBasis, PsiParams};

/// A matrix of terms (entries stored row-major).
#[derive(Clone)]
struct TermMat {
    n: usize,
    entries: Vec<Term>,
}

impl TermMat {
    fn of_vars(prefix: &str, n: usize) -> (Vec<Sym>, TermMat) {
        let mut syms = Vec::with_capacity(n * n);
        let mut entries = Vec::with_capacity(n * n);
        for i in 1..=n {
            for j in 1..=n {
                let s = Sym::intern(&format!("{prefix}_{i}_{j}"));
                syms.push(s);
                entries.push(Term::Var(s));
            }
        }
        (syms, TermMat { n, entries })
    }

    fn identity(n: usize) -> TermMat {
        let entries = (0..n * n)
            .map(|k| if k / n == k % n { Term::One } else { Term::Zero })
            .collect();
        TermMat { n, entries }
    }

    fn mul(&self, other: &TermMat) -> TermMat {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(Term::sum(
                    (0..n).map(|l| {
                        Term::mul(self.entries[i * n + l].clone(), other.entries[l * n + j].clone())
                    }),
                ));
            }
        }
        TermMat { n, entries }
    }

    /// Entrywise equations `self = other`.
    fn equals(&self, other: &TermMat) -> Vec<Formula> {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| Formula::eq(a.clone(), b.clone()))
            .collect()
    }
}

/// `Z_a_b` symbols in row-major order (the interning order fixes the printed
/// variable order once and for all).
pub fn parameter_syms(c: usize) -> Vec<Sym> {
    let mut out = Vec::with_capacity(c * c);
    for a in 1..=c {
        for b in 1..=c {
            out.push(Sym::intern(&format!("Z_{a}_{b}")));
        }
    }
    out
}

fn monomial_term(exponents: &[u32], entries: &[Term]) -> Term {
    let mut factors = Vec::new();
    for (slot, &k) in exponents.iter().enumerate() {
        if k >= 1 {
            factors.push(Term::power(entries[slot].clone(), k as u64));
        }
    }
    match factors.len() {
        0 => Term::One,
        _ => {
            let mut it = factors.into_iter();
            let first = it.next().unwrap();
            it.fold(first, Term::mul)
        }
    }
}

/// The polynomial `g_d` (0-based `d`) applied to a matrix of terms:
/// `sum_e Z_(e+1)_(d+1) * m_e(X)`.
fn g_term(basis: &MonomialBasis, d: usize, x: &TermMat) -> Term {
    Term::sum(basis.exponents().iter().enumerate().map(|(e, exps)| {
        let z = Term::Var(Sym::intern(&format!("Z_{}_{}", e + 1, d + 1)));
        match monomial_term(exps, &x.entries) {
            Term::One => z,
            m => Term::mul(z, m),
        }
    }))
}

/// `g_d(X) = 0` for every d.
fn vanishing_eqs(basis: &MonomialBasis, x: &TermMat) -> Vec<Formula> {
    (0..basis.c())
        .map(|d| Formula::eq(g_term(basis, d, x), Term::Zero))
        .collect()
}

/// `det(X) = 1` without subtraction: even-permutation products on the left,
/// `1 +` odd-permutation products on the right.
fn det_is_one(x: &TermMat) -> Formula {
    let n = x.n;
    let mut even = Vec::new();
    let mut odd = Vec::new();
    let mut perm: Vec<usize> = (0..n).collect();
    permute_terms(&mut perm, 0, x, &mut even, &mut odd);
    let lhs = Term::sum(even);
    let rhs = match odd.len() {
        0 => Term::One,
        _ => Term::add(Term::One, Term::sum(odd)),
    };
    Formula::eq(lhs, rhs)
}

fn permute_terms(
    perm: &mut Vec<usize>,
    k: usize,
    x: &TermMat,
    even: &mut Vec<Term>,
    odd: &mut Vec<Term>,
) {
    let n = perm.len();
    if k == n {
        let mut sign = 0usize;
        for i in 0..n {
            for j in i + 1..n {
                if perm[i] > perm[j] {
                    sign += 1;
                }
            }
        }
        let prod = (0..n)
            .map(|i| x.entries[i * n + perm[i]].clone())
            .reduce(Term::mul)
            .expect("n >= 1");
        if sign % 2 == 0 {
            even.push(prod);
        } else {
            odd.push(prod);
        }
        return;
    }
    for i in k..n {
        perm.swap(k, i);
        permute_terms(perm, k + 1, x, even, odd);
        perm.swap(k, i);
    }
}

/// Full membership `X in G_Z`: `det(X) = 1` and every `g_d(X) = 0`.
fn membership(basis: &MonomialBasis, x: &TermMat) -> Formula {
    let mut parts = vec![det_is_one(x)];
    parts.extend(vanishing_eqs(basis, x));
    Formula::and_all(parts)
}

/// Membership formula for a named matrix variable, exposed for the
/// shorthand-soundness checks: free variables are the `Z_a_b` plus the
/// matrix entries.
pub fn membership_formula(basis: &MonomialBasis, prefix: &str) -> Formula {
    let (_, x) = TermMat::of_vars(prefix, basis.n());
    membership(basis, &x)
}

/// Product closure: for all `U, V` in the vanishing set, the product
/// `W_ij = sum_l U_il V_lj` is in the vanishing set.
pub fn build_phi(basis: &MonomialBasis) -> Formula {
    let n = basis.n();
    let (u_syms, u) = TermMat::of_vars("U", n);
    let (v_syms, v) = TermMat::of_vars("V", n);
    let w = u.mul(&v);
    let antecedent = Formula::and(
        Formula::and_all(vanishing_eqs(basis, &u)),
        Formula::and_all(vanishing_eqs(basis, &v)),
    );
    let consequent = Formula::and_all(vanishing_eqs(basis, &w));
    Formula::forall_all(
        u_syms.into_iter().chain(v_syms),
        Formula::implies(antecedent, consequent),
    )
}

/// Inverse closure: for all `U, V`, if `U` is a member and `UV = VU = I`
/// then `V` is a member.
pub fn build_chi(basis: &MonomialBasis) -> Formula {
    let n = basis.n();
    let (u_syms, u) = TermMat::of_vars("U", n);
    let (v_syms, v) = TermMat::of_vars("V", n);
    let id = TermMat::identity(n);
    let mut antecedent_parts = vec![membership(basis, &u)];
    antecedent_parts.extend(u.mul(&v).equals(&id));
    antecedent_parts.extend(v.mul(&u).equals(&id));
    let consequent = membership(basis, &v);
    Formula::forall_all(
        u_syms.into_iter().chain(v_syms),
        Formula::implies(Formula::and_all(antecedent_parts), consequent),
    )
}

/// Identity membership: every `g_d` vanishes at the identity matrix.
pub fn build_eta(basis: &MonomialBasis) -> Formula {
    let id = TermMat::identity(basis.n());
    Formula::and_all(vanishing_eqs(basis, &id))
}

/// The conjunction `phi & chi & eta`, the guard deciding whether a parameter
/// tuple defines a subgroup.
pub fn build_guard(basis: &MonomialBasis) -> Formula {
    Formula::and(
        Formula::and(build_phi(basis), build_chi(basis)),
        build_eta(basis),
    )
}

/// Equations pinning `target = base^e` through a chain of auxiliary matrix
/// variables. Returns the auxiliary entry symbols and the equations.
/// Negative exponents go through a quantified two-sided inverse first.
fn power_eqs(
    label: &str,
    base: &TermMat,
    target: &TermMat,
    e: i64,
    n: usize,
) -> (Vec<Sym>, Vec<Formula>) {
    let mut aux = Vec::new();
    let mut eqs = Vec::new();
    let id = TermMat::identity(n);
    let base = if e < 0 {
        let (inv_syms, inv) = TermMat::of_vars(&format!("{label}inv"), n);
        aux.extend(inv_syms);
        eqs.extend(base.mul(&inv).equals(&id));
        eqs.extend(inv.mul(base).equals(&id));
        inv
    } else {
        base.clone()
    };
    let e = e.unsigned_abs();
    match e {
        0 => eqs.extend(target.equals(&id)),
        1 => eqs.extend(target.equals(&base)),
        _ => {
            let mut prev = base.clone();
            for k in 2..=e {
                if k == e {
                    eqs.extend(target.equals(&prev.mul(&base)));
                } else {
                    let (p_syms, p) = TermMat::of_vars(&format!("{label}p{k}"), n);
                    aux.extend(p_syms);
                    eqs.extend(p.equals(&prev.mul(&base)));
                    prev = p;
                }
            }
        }
    }
    (aux, eqs)
}

/// Equations pinning `target = [a, b] = a b a^-1 b^-1`, introducing the two
/// quantified inverses.
fn commutator_eqs(
    label_a: &str,
    label_b: &str,
    a: &TermMat,
    b: &TermMat,
    target: &TermMat,
    n: usize,
) -> (Vec<Sym>, Vec<Formula>) {
    let id = TermMat::identity(n);
    let (ai_syms, ai) = TermMat::of_vars(&format!("{label_a}inv"), n);
    let (bi_syms, bi) = TermMat::of_vars(&format!("{label_b}inv"), n);
    let mut aux = ai_syms;
    aux.extend(bi_syms);
    let mut eqs = Vec::new();
    eqs.extend(a.mul(&ai).equals(&id));
    eqs.extend(ai.mul(a).equals(&id));
    eqs.extend(b.mul(&bi).equals(&id));
    eqs.extend(bi.mul(b).equals(&id));
    eqs.extend(target.equals(&a.mul(b).mul(&ai).mul(&bi)));
    (aux, eqs)
}

/// The closed sentence: for every parameter tuple whose guard holds, every
/// triple `A, B, D` of members with `D = [A,B]^s` and `[A,B] = D^t` admits
/// member witnesses `S, T` with `D = [S, T]`.
///
/// Shape: `forall Z. guard -> forall A B D. hyp -> exists S T. wit`, with
/// the auxiliary matrices of `hyp` existentially quantified inside the
/// antecedent.
pub fn build_psi(params: &PsiParams, basis: &MonomialBasis) -> Formula {
    assert_eq!(params.n, basis.n());
    assert_eq!(params.r, basis.r());
    let n = params.n;
    let z_syms = parameter_syms(basis.c());

    let (a_syms, a) = TermMat::of_vars("A", n);
    let (b_syms, b) = TermMat::of_vars("B", n);
    let (d_syms, d) = TermMat::of_vars("D", n);

    // Hypothesis auxiliaries: C = [A, B], D = C^s, C = D^t.
    let (c_syms, c_mat) = TermMat::of_vars("C", n);
    let (mut aux, mut eqs) = commutator_eqs("A", "B", &a, &b, &c_mat, n);
    let (s_aux, s_eqs) = power_eqs("Cs", &c_mat, &d, params.s, n);
    aux.extend(s_aux);
    eqs.extend(s_eqs);
    let (t_aux, t_eqs) = power_eqs("Dt", &d, &c_mat, params.t, n);
    aux.extend(t_aux);
    eqs.extend(t_eqs);

    let hyp = Formula::and_all([
        membership(basis, &a),
        membership(basis, &b),
        membership(basis, &d),
        Formula::exists_all(
            c_syms.into_iter().chain(aux),
            Formula::and_all(eqs),
        ),
    ]);

    // Witness side: S, T members with D = [S, T].
    let (s_syms, s_mat) = TermMat::of_vars("S", n);
    let (t_syms, t_mat) = TermMat::of_vars("T", n);
    let (w_aux, w_eqs) = commutator_eqs("S", "T", &s_mat, &t_mat, &d, n);
    let witness = Formula::exists_all(
        s_syms.into_iter().chain(t_syms),
        Formula::and_all([
            membership(basis, &s_mat),
            membership(basis, &t_mat),
            Formula::exists_all(w_aux, Formula::and_all(w_eqs)),
        ]),
    );

    let inner = Formula::forall_all(
        a_syms.into_iter().chain(b_syms).chain(d_syms),
        Formula::implies(hyp, witness),
    );

    Formula::forall_all(z_syms, Formula::implies(build_guard(basis), inner))
}

/// Variant scoping for the parameter quantifier: the guard is closed under
/// its own universal quantifier and the whole implication sits outside it.
/// Over any fixed finite ring this has the same truth value as
/// [`build_psi`]; it exists to make that claim testable.
pub fn build_psi_guard_scoped(params: &PsiParams, basis: &MonomialBasis) -> Formula {
    let psi = build_psi(params, basis);
    // Split the standard form  forall Z. (guard -> inner)  into
    // (forall Z. guard) -> (forall Z. inner).
    let z_syms = parameter_syms(basis.c());
    let mut body = &psi;
    for _ in 0..z_syms.len() {
        match body {
            Formula::ForAll(_, inner) => body = inner,
            _ => unreachable!("psi starts with the parameter quantifiers"),
        }
    }
    match body {
        Formula::Implies(guard, inner) => Formula::implies(
            Formula::forall_all(z_syms.clone(), (**guard).clone()),
            Formula::forall_all(z_syms, (**inner).clone()),
        ),
        _ => unreachable!("psi body is an implication"),
    }
}
