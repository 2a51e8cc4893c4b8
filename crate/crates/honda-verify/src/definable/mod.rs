//! First-order definable subgroups of `SL_n` of bounded complexity.
//!
//! A subgroup candidate is cut out of `SL_n(Z/m)` by `c` parameterized
//! polynomials `g_d(X, alpha) = sum_e alpha[e][d] * m_e(X)`, where
//! `m_1, ..., m_c` lists every monomial of total degree at most `r` in the
//! `n^2` matrix entries and `alpha` is a `c x c` parameter tuple. Sweeping
//! `alpha` over the whole ring sweeps over every subgroup of complexity at
//! most `r`, which is what the sentence builders in [`formulas`] and the
//! semantic sweeps in [`sweep`] quantify over.

pub mod formulas;
pub mod sweep;

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::matgroup::SquareMatrix;
use crate::ring::ResidueRing;

/// Hard cap on the number of raw candidate matrices a point space may scan.
pub const MAX_POINT_SPACE: u64 = 1 << 20;
/// Point count up to which the full product table is precomputed.
const PRODUCT_TABLE_LIMIT: usize = 2048;
/// Entry budget for the precomputed monomial-value table.
const MONOMIAL_TABLE_LIMIT: usize = 1 << 23;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DefinableError {
    #[error("degree bound r = {r} must be at least n = {n} so the determinant constraint (degree n) fits the complexity budget")]
    DegreeBoundTooSmall { n: usize, r: usize },
    #[error("degree bound r must be at least 1, got {0}")]
    DegreeBoundZero(usize),
    #[error("point space has {required} candidate matrices, above the cap of {cap}")]
    PointSpaceTooLarge { required: u64, cap: u64 },
    #[error("monomial index {d} out of range 1..={c}")]
    IndexOutOfRange { d: usize, c: usize },
    #[error("exhaustive sweep needs about 2^{alpha_count_bits} alpha tuples, above the cap of {cap}; use sampled mode")]
    ExhaustiveCapExceeded { alpha_count_bits: u32, cap: u64 },
    #[error("parameter tuple has {got} entries, expected c^2 = {expected}")]
    BadTupleShape { got: usize, expected: usize },
}

/// The ordered listing of all monomials of total degree at most `r` in the
/// `n^2` matrix-entry variables. Order is graded: degree ascending, and
/// within a degree exponent vectors descend lexicographically, so the
/// constant monomial is first and the degree-one block follows in row-major
/// variable order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonomialBasis {
    n: usize,
    r: usize,
    exponents: Vec<Vec<u32>>,
}

impl MonomialBasis {
    /// Standard constructor: requires `r >= n`, so that the determinant
    /// polynomial itself fits the degree budget and the basis can express
    /// every subgroup of complexity at most `r`.
    pub fn build(n: usize, r: usize) -> Result<Arc<MonomialBasis>, DefinableError> {
        if r < n {
            return Err(DefinableError::DegreeBoundTooSmall { n, r });
        }
        Self::build_low_degree(n, r)
    }

    /// Constructor admitting `1 <= r < n`: the constraint polynomials then
    /// sit below the determinant degree, which narrows the family of
    /// definable candidates but keeps every realized candidate and every
    /// sweep over them exact. The large exhaustive sweeps run at
    /// `n = 2, r = 1` through this path.
    pub fn build_low_degree(n: usize, r: usize) -> Result<Arc<MonomialBasis>, DefinableError> {
        if r < 1 {
            return Err(DefinableError::DegreeBoundZero(r));
        }
        let vars = n * n;
        let mut exponents = Vec::new();
        let mut current = vec![0u32; vars];
        enumerate_exponents(&mut current, 0, r as u32, &mut exponents);
        exponents.sort_by(|a, b| {
            let da: u32 = a.iter().sum();
            let db: u32 = b.iter().sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        Ok(Arc::new(MonomialBasis { n, r, exponents }))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of monomials; equals `binomial(n^2 + r, n^2)`.
    pub fn c(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[Vec<u32>] {
        &self.exponents
    }

    /// Value of the e-th monomial (0-based) at a point given by canonical
    /// entry residues.
    pub fn monomial_value(&self, e: usize, entries: &[u64], ring: &ResidueRing) -> u64 {
        let mut acc = 1 % ring.modulus();
        for (slot, &exp) in self.exponents[e].iter().enumerate() {
            for _ in 0..exp {
                acc = ring.mul_raw(acc, entries[slot]);
            }
        }
        acc
    }
}

fn enumerate_exponents(current: &mut Vec<u32>, slot: usize, budget: u32, out: &mut Vec<Vec<u32>>) {
    if slot == current.len() {
        out.push(current.clone());
        return;
    }
    for e in 0..=budget {
        current[slot] = e;
        enumerate_exponents(current, slot + 1, budget - e, out);
    }
    current[slot] = 0;
}

/// `binomial(a, b)` as an exact u64 (used by the basis-count law).
pub fn binomial(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    acc as u64
}

/// A `c x c` tuple of ring values: entry `(e, d)` (0-based, row-major) is the
/// coefficient of monomial `m_e` in the polynomial `g_d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterTuple {
    ring: ResidueRing,
    basis: Arc<MonomialBasis>,
    entries: Vec<u64>,
}

impl ParameterTuple {
    pub fn new(
        ring: ResidueRing,
        basis: Arc<MonomialBasis>,
        entries: Vec<u64>,
    ) -> Result<ParameterTuple, DefinableError> {
        let c = basis.c();
        if entries.len() != c * c {
            return Err(DefinableError::BadTupleShape {
                got: entries.len(),
                expected: c * c,
            });
        }
        Ok(ParameterTuple {
            ring,
            basis,
            entries: entries.into_iter().map(|v| v % ring.modulus()).collect(),
        })
    }

    pub fn zeros(ring: ResidueRing, basis: Arc<MonomialBasis>) -> ParameterTuple {
        let c = basis.c();
        ParameterTuple {
            ring,
            basis,
            entries: vec![0; c * c],
        }
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn get(&self, e: usize, d: usize) -> u64 {
        self.entries[e * self.basis.c() + d]
    }

    pub fn set(&mut self, e: usize, d: usize, v: u64) {
        let c = self.basis.c();
        self.entries[e * c + d] = v % self.ring.modulus();
    }

    /// Re-expresses the same constraint system in the degree-(r+1) basis by
    /// mapping each monomial row to its new position and padding with zeros.
    pub fn embed_in_larger_basis(
        &self,
        larger: &Arc<MonomialBasis>,
    ) -> Result<ParameterTuple, DefinableError> {
        assert_eq!(self.basis.n(), larger.n());
        assert!(larger.r() >= self.basis.r());
        let c_old = self.basis.c();
        let c_new = larger.c();
        let mut entries = vec![0u64; c_new * c_new];
        for (e_old, exps) in self.basis.exponents().iter().enumerate() {
            let e_new = larger
                .exponents()
                .iter()
                .position(|x| x == exps)
                .expect("every low-degree monomial appears in the larger basis");
            for d in 0..c_old {
                entries[e_new * c_new + d] = self.get(e_old, d);
            }
        }
        ParameterTuple::new(self.ring, Arc::clone(larger), entries)
    }
}

/// Parameters of the subgroup-commutator sentence: dimension `n`, exponents
/// `s, t` (any sign), and the complexity bound `r >= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PsiParams {
    pub n: usize,
    pub s: i64,
    pub t: i64,
    pub r: usize,
}

impl PsiParams {
    /// `r` may sit below `n` (see [`MonomialBasis::build_low_degree`]); only
    /// `r = 0` is rejected.
    pub fn new(n: usize, s: i64, t: i64, r: usize) -> Result<PsiParams, DefinableError> {
        if r < 1 {
            return Err(DefinableError::DegreeBoundZero(r));
        }
        Ok(PsiParams { n, s, t, r })
    }
}

/// The fully enumerated affine space of `n x n` matrices over a small ring,
/// with determinants, monomial values, inverses of unimodular points and
/// (for small spaces) the full product table. Index order is lexicographic
/// in the row-major entry vector; shared immutably by every sweep worker.
#[derive(Debug)]
pub struct PointSpace {
    ring: ResidueRing,
    n: usize,
    basis: Arc<MonomialBasis>,
    point_count: usize,
    dets: Vec<u64>,
    identity: u32,
    monomial_values: Option<Vec<u64>>,
    products: Option<Vec<u32>>,
    inverses: Vec<Option<u32>>,
}

impl PointSpace {
    pub fn build(
        ring: ResidueRing,
        basis: &Arc<MonomialBasis>,
    ) -> Result<Arc<PointSpace>, DefinableError> {
        let n = basis.n();
        let m = ring.modulus();
        let vars = n * n;
        let required = (0..vars).try_fold(1u64, |acc, _| acc.checked_mul(m)).unwrap_or(u64::MAX);
        if required > MAX_POINT_SPACE {
            return Err(DefinableError::PointSpaceTooLarge {
                required,
                cap: MAX_POINT_SPACE,
            });
        }
        let point_count = required as usize;
        let c = basis.c();

        let mut dets = Vec::with_capacity(point_count);
        let mut inverses = vec![None; point_count];
        let mut entries = vec![0u64; vars];
        let one = 1 % m;
        for p in 0..point_count {
            decode_point(p as u64, m, &mut entries);
            let mat = SquareMatrix::from_values(ring, n, entries.clone()).expect("shape");
            let det = mat.det().value();
            dets.push(det);
            if det == one {
                let inv = mat.adjugate();
                inverses[p] = Some(encode_point(inv.entries(), m));
            }
        }

        let monomial_values = if point_count.saturating_mul(c) <= MONOMIAL_TABLE_LIMIT {
            let mut table = vec![0u64; point_count * c];
            for p in 0..point_count {
                decode_point(p as u64, m, &mut entries);
                for e in 0..c {
                    table[p * c + e] = basis.monomial_value(e, &entries, &ring);
                }
            }
            Some(table)
        } else {
            None
        };

        let products = if point_count <= PRODUCT_TABLE_LIMIT {
            let mut table = vec![0u32; point_count * point_count];
            let mut a = vec![0u64; vars];
            let mut b = vec![0u64; vars];
            let mut prod = vec![0u64; vars];
            for p in 0..point_count {
                decode_point(p as u64, m, &mut a);
                for q in 0..point_count {
                    decode_point(q as u64, m, &mut b);
                    mat_mul_raw(&a, &b, n, &ring, &mut prod);
                    table[p * point_count + q] = encode_point(&prod, m);
                }
            }
            Some(table)
        } else {
            None
        };

        let identity_entries: Vec<u64> = SquareMatrix::identity(ring, n).entries().to_vec();
        Ok(Arc::new(PointSpace {
            ring,
            n,
            basis: Arc::clone(basis),
            point_count,
            dets,
            identity: encode_point(&identity_entries, m),
            monomial_values,
            products,
            inverses,
        }))
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &Arc<MonomialBasis> {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.point_count
    }

    pub fn is_empty(&self) -> bool {
        self.point_count == 0
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn det(&self, p: u32) -> u64 {
        self.dets[p as usize]
    }

    pub fn is_unimodular(&self, p: u32) -> bool {
        self.dets[p as usize] == 1 % self.ring.modulus()
    }

    pub fn point_entries(&self, p: u32) -> Vec<u64> {
        let mut out = vec![0u64; self.n * self.n];
        decode_point(p as u64, self.ring.modulus(), &mut out);
        out
    }

    pub fn matrix(&self, p: u32) -> SquareMatrix {
        SquareMatrix::from_values(self.ring, self.n, self.point_entries(p)).expect("shape")
    }

    #[inline]
    pub fn monomial_value_at(&self, p: u32, e: usize) -> u64 {
        match &self.monomial_values {
            Some(table) => table[p as usize * self.basis.c() + e],
            None => {
                let entries = self.point_entries(p);
                self.basis.monomial_value(e, &entries, &self.ring)
            }
        }
    }

    /// Row of monomial values for one point when the table is present.
    #[inline]
    pub fn monomial_row(&self, p: u32) -> Option<&[u64]> {
        self.monomial_values
            .as_ref()
            .map(|t| &t[p as usize * self.basis.c()..(p as usize + 1) * self.basis.c()])
    }

    #[inline]
    pub fn mul(&self, p: u32, q: u32) -> u32 {
        match &self.products {
            Some(table) => table[p as usize * self.point_count + q as usize],
            None => {
                let m = self.ring.modulus();
                let a = self.point_entries(p);
                let b = self.point_entries(q);
                let mut prod = vec![0u64; self.n * self.n];
                mat_mul_raw(&a, &b, self.n, &self.ring, &mut prod);
                encode_point(&prod, m)
            }
        }
    }

    pub fn inverse(&self, p: u32) -> Option<u32> {
        self.inverses[p as usize]
    }

    pub fn pow(&self, p: u32, e: i64) -> Option<u32> {
        let base = if e < 0 { self.inverse(p)? } else { p };
        let mut e = e.unsigned_abs();
        let mut acc = self.identity;
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        Some(acc)
    }

    /// `g_d(point, alpha)` for 0-based `d`, using raw alpha digits laid out
    /// row-major as in [`ParameterTuple`].
    #[inline]
    pub fn eval_g_raw(&self, p: u32, alpha: &[u64], d: usize) -> u64 {
        let c = self.basis.c();
        let m = self.ring.modulus();
        let mut acc = 0u64;
        match self.monomial_row(p) {
            Some(row) => {
                for e in 0..c {
                    acc = self.ring.add_raw(acc, alpha[e * c + d] * row[e] % m);
                }
            }
            None => {
                for e in 0..c {
                    let mv = self.monomial_value_at(p, e);
                    acc = self.ring.add_raw(acc, alpha[e * c + d] * mv % m);
                }
            }
        }
        acc
    }

    /// True when every `g_d` vanishes at the point.
    #[inline]
    pub fn vanishes(&self, p: u32, alpha: &[u64]) -> bool {
        (0..self.basis.c()).all(|d| self.eval_g_raw(p, alpha, d) == 0)
    }
}

pub fn decode_point(mut index: u64, m: u64, out: &mut [u64]) {
    for slot in (0..out.len()).rev() {
        out[slot] = index % m;
        index /= m;
    }
}

pub fn encode_point(entries: &[u64], m: u64) -> u32 {
    let mut acc = 0u64;
    for &v in entries {
        acc = acc * m + v;
    }
    acc as u32
}

fn mat_mul_raw(a: &[u64], b: &[u64], n: usize, ring: &ResidueRing, out: &mut [u64]) {
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0u64;
            for l in 0..n {
                acc = ring.add_raw(acc, ring.mul_raw(a[i * n + l], b[l * n + j]));
            }
            out[i * n + j] = acc;
        }
    }
}

/// `g_d(point, alpha)` with 1-based `d`, on an arbitrary matrix.
pub fn eval_g(
    basis: &MonomialBasis,
    d: usize,
    point: &SquareMatrix,
    alpha: &ParameterTuple,
) -> Result<crate::ring::RingElement, DefinableError> {
    let c = basis.c();
    if d < 1 || d > c {
        return Err(DefinableError::IndexOutOfRange { d, c });
    }
    let ring = alpha.ring();
    let mut acc = 0u64;
    for e in 0..c {
        let mv = basis.monomial_value(e, point.entries(), &ring);
        acc = ring.add_raw(acc, ring.mul_raw(alpha.get(e, d - 1), mv));
    }
    Ok(ring.element(acc))
}

/// The realized subgroup candidate for one parameter tuple: the vanishing
/// set of the `g_d` and its unimodular part (the members), together with the
/// closure diagnostics mirroring the three guard formulas.
#[derive(Debug, Clone)]
pub struct SubgroupCandidate {
    space: Arc<PointSpace>,
    alpha: ParameterTuple,
    vanishing: Vec<u32>,
    members: Vec<u32>,
}

impl SubgroupCandidate {
    pub fn alpha(&self) -> &ParameterTuple {
        &self.alpha
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    pub fn vanishing_set(&self) -> &[u32] {
        &self.vanishing
    }

    pub fn member_matrices(&self) -> Vec<SquareMatrix> {
        self.members.iter().map(|&p| self.space.matrix(p)).collect()
    }

    /// Mirror of the product-closure formula: the whole vanishing set
    /// (unimodular or not) is closed under multiplication.
    pub fn vanishing_product_closed(&self) -> bool {
        let set: std::collections::BTreeSet<u32> = self.vanishing.iter().copied().collect();
        self.vanishing
            .iter()
            .all(|&u| self.vanishing.iter().all(|&v| set.contains(&self.space.mul(u, v))))
    }

    /// Mirror of the inverse-closure formula: the two-sided inverse of every
    /// member again satisfies every `g_d`.
    pub fn inverse_closed(&self) -> bool {
        self.members.iter().all(|&u| {
            let inv = self.space.inverse(u).expect("members are unimodular");
            self.space.vanishes(inv, self.alpha.entries())
        })
    }

    /// Mirror of the identity formula: the identity satisfies every `g_d`.
    pub fn identity_in_vanishing(&self) -> bool {
        self.vanishing.binary_search(&self.space.identity()).is_ok()
    }

    /// The semantic counterpart of the conjunction of the three guard
    /// formulas. When this holds the members provably form a subgroup.
    pub fn guard_ok(&self) -> bool {
        self.identity_in_vanishing() && self.inverse_closed() && self.vanishing_product_closed()
    }

    /// Direct set-level check that the member set is a subgroup: contains
    /// the identity and is closed under product and inverse. Weaker than
    /// [`Self::guard_ok`], which also constrains non-unimodular points.
    pub fn members_form_group(&self) -> bool {
        let set: std::collections::BTreeSet<u32> = self.members.iter().copied().collect();
        set.contains(&self.space.identity())
            && self.members.iter().all(|&u| {
                set.contains(&self.space.inverse(u).expect("members are unimodular"))
                    && self.members.iter().all(|&v| set.contains(&self.space.mul(u, v)))
            })
    }
}

/// Scans the whole point space and returns the candidate for one tuple.
pub fn realize_subgroup(
    space: &Arc<PointSpace>,
    alpha: &ParameterTuple,
) -> SubgroupCandidate {
    let mut vanishing = Vec::new();
    let mut members = Vec::new();
    for p in 0..space.len() as u32 {
        if space.vanishes(p, alpha.entries()) {
            vanishing.push(p);
            if space.is_unimodular(p) {
                members.push(p);
            }
        }
    }
    SubgroupCandidate {
        space: Arc::clone(space),
        alpha: alpha.clone(),
        vanishing,
        members,
    }
}
