//! Finite matrix groups inside `SL_n` over a residue ring.
//!
//! A [`GroupTable`] is a fully enumerated finite group: every element, its
//! inverse, its order and its conjugacy class. On top of that sit the
//! commutator analysers and the Honda / strong-Honda verifiers. A group `G`
//! has the *Honda property* when for every commutator `gamma` and every
//! `delta` generating the same cyclic subgroup, `delta` is a commutator too;
//! the *strong* variant asks for witnesses inside `<alpha, beta>` when
//! `gamma = [alpha, beta]`.
//!
//! Commutator convention throughout: `[a, b] = a b a^-1 b^-1`. The verifier
//! outcome does not depend on this choice (see the convention test below).

use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ring::{units_mod, ResidueRing, RingElement};

/// Default cap on the number of elements a closure is allowed to reach.
pub const DEFAULT_CLOSURE_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix dimensions differ ({0} vs {1})")]
    DimensionMismatch(usize, usize),
    #[error("matrices live in different rings (Z/{0} vs Z/{1})")]
    MixedRings(u64, u64),
    #[error("generator has determinant {det}, expected 1")]
    NotUnimodular { det: u64 },
    #[error("closure exceeded the element budget of {cap}")]
    ClosureCapExceeded { cap: usize },
    #[error("matrix is not invertible (determinant {det} is not a unit mod {modulus})")]
    NotInvertible { det: u64, modulus: u64 },
    #[error("element index {0} out of range (group order {1})")]
    IndexOutOfRange(usize, usize),
}

/// An `n x n` matrix with entries in one residue ring, stored row-major as
/// canonical residues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SquareMatrix {
    n: usize,
    ring: ResidueRing,
    entries: Vec<u64>,
}

impl SquareMatrix {
    pub fn new(ring: ResidueRing, n: usize, entries: &[i64]) -> Result<Self, GroupError> {
        if entries.len() != n * n {
            return Err(GroupError::DimensionMismatch(entries.len(), n * n));
        }
        Ok(SquareMatrix {
            n,
            ring,
            entries: entries
                .iter()
                .map(|&v| ring.element_from_i64(v).value())
                .collect(),
        })
    }

    pub fn from_values(ring: ResidueRing, n: usize, entries: Vec<u64>) -> Result<Self, GroupError> {
        if entries.len() != n * n {
            return Err(GroupError::DimensionMismatch(entries.len(), n * n));
        }
        Ok(SquareMatrix {
            n,
            ring,
            entries: entries.into_iter().map(|v| v % ring.modulus()).collect(),
        })
    }

    pub fn identity(ring: ResidueRing, n: usize) -> Self {
        let mut entries = vec![0; n * n];
        for i in 0..n {
            entries[i * n + i] = 1 % ring.modulus();
        }
        SquareMatrix { n, ring, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn entry(&self, i: usize, j: usize) -> RingElement {
        self.ring.element(self.entries[i * self.n + j])
    }

    fn check_compatible(&self, other: &SquareMatrix) -> Result<(), GroupError> {
        if self.n != other.n {
            return Err(GroupError::DimensionMismatch(self.n, other.n));
        }
        if self.ring.modulus() != other.ring.modulus() {
            return Err(GroupError::MixedRings(
                self.ring.modulus(),
                other.ring.modulus(),
            ));
        }
        Ok(())
    }

    pub fn mul(&self, other: &SquareMatrix) -> Result<SquareMatrix, GroupError> {
        self.check_compatible(other)?;
        let n = self.n;
        let r = &self.ring;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0u64;
                for l in 0..n {
                    acc = r.add_raw(acc, r.mul_raw(self.entries[i * n + l], other.entries[l * n + j]));
                }
                out[i * n + j] = acc;
            }
        }
        Ok(SquareMatrix {
            n,
            ring: self.ring,
            entries: out,
        })
    }

    /// Determinant by cofactor expansion; exact mod m. Dimensions stay small
    /// (n <= 4 in practice), so the factorial cost is irrelevant.
    pub fn det(&self) -> RingElement {
        self.ring.element(det_rec(&self.entries, self.n, &self.ring))
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().value() == 1 % self.ring.modulus()
    }

    /// Adjugate matrix: `adj(A)_{ij} = (-1)^{i+j} det(minor_{ji})`. Satisfies
    /// `A * adj(A) = det(A) * I` over any commutative ring.
    pub fn adjugate(&self) -> SquareMatrix {
        let n = self.n;
        let r = &self.ring;
        if n == 1 {
            return SquareMatrix {
                n,
                ring: self.ring,
                entries: vec![1 % r.modulus()],
            };
        }
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let minor = minor_of(&self.entries, n, j, i);
                let cof = det_rec(&minor, n - 1, r);
                out[i * n + j] = if (i + j) % 2 == 0 { cof } else { r.neg_raw(cof) };
            }
        }
        SquareMatrix {
            n,
            ring: self.ring,
            entries: out,
        }
    }

    /// Inverse via the adjugate. Requires determinant 1, which holds for all
    /// group elements here and keeps the formula polynomial in the entries
    /// (no division), so it works over non-field rings `Z/p^k`.
    pub fn inverse(&self) -> Result<SquareMatrix, GroupError> {
        let det = self.det().value();
        if det != 1 % self.ring.modulus() {
            return Err(GroupError::NotInvertible {
                det,
                modulus: self.ring.modulus(),
            });
        }
        Ok(self.adjugate())
    }

    pub fn pow(&self, e: i64) -> Result<SquareMatrix, GroupError> {
        if e < 0 {
            return self.inverse()?.pow(-e);
        }
        let mut result = SquareMatrix::identity(self.ring, self.n);
        let mut base = self.clone();
        let mut e = e as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(result)
    }

    /// Entrywise reduction to a smaller modulus (a group homomorphism on
    /// `SL_n` when the target modulus divides the source).
    pub fn reduce(&self, target: ResidueRing) -> SquareMatrix {
        SquareMatrix {
            n: self.n,
            ring: target,
            entries: self.entries.iter().map(|&v| v % target.modulus()).collect(),
        }
    }
}

impl std::fmt::Display for SquareMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.n {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", self.entries[i * self.n + j])?;
            }
        }
        write!(f, "]")
    }
}

fn minor_of(entries: &[u64], n: usize, skip_row: usize, skip_col: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity((n - 1) * (n - 1));
    for i in 0..n {
        if i == skip_row {
            continue;
        }
        for j in 0..n {
            if j == skip_col {
                continue;
            }
            out.push(entries[i * n + j]);
        }
    }
    out
}

fn det_rec(entries: &[u64], n: usize, r: &ResidueRing) -> u64 {
    match n {
        0 => 1 % r.modulus(),
        1 => entries[0],
        2 => r.sub_raw(
            r.mul_raw(entries[0], entries[3]),
            r.mul_raw(entries[1], entries[2]),
        ),
        _ => {
            let mut acc = 0u64;
            for j in 0..n {
                let minor = minor_of(entries, n, 0, j);
                let term = r.mul_raw(entries[j], det_rec(&minor, n - 1, r));
                acc = if j % 2 == 0 {
                    r.add_raw(acc, term)
                } else {
                    r.sub_raw(acc, term)
                };
            }
            acc
        }
    }
}

/// `[a, b] = a b a^-1 b^-1`.
pub fn commutator(a: &SquareMatrix, b: &SquareMatrix) -> Result<SquareMatrix, GroupError> {
    a.check_compatible(b)?;
    a.mul(b)?.mul(&a.inverse()?)?.mul(&b.inverse()?)
}

/// A commutator certificate: `[sigma, tau] = target`, re-verifiable by
/// direct multiplication.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessCert {
    pub sigma: SquareMatrix,
    pub tau: SquareMatrix,
    pub target: SquareMatrix,
}

impl WitnessCert {
    pub fn verify(&self) -> bool {
        commutator(&self.sigma, &self.tau)
            .map(|c| c == self.target)
            .unwrap_or(false)
    }
}

/// Outcome of a Honda check on one group.
#[derive(Debug, Clone, Serialize)]
pub struct HondaReport {
    pub pass: bool,
    pub group_order: usize,
    pub commutator_count: usize,
    pub pairs_checked: u64,
    /// On failure, a commutator `gamma` and a generator `delta` of
    /// `<gamma>` that is not itself a commutator.
    pub counterexample: Option<(SquareMatrix, SquareMatrix)>,
}

/// Outcome of a strong-Honda check for one generator pair.
#[derive(Debug, Clone, Serialize)]
pub struct StrongHondaReport {
    pub pass: bool,
    pub subgroup_order: usize,
    pub gamma_order: u64,
    pub certs: Vec<WitnessCert>,
    pub failure: Option<SquareMatrix>,
}

/// A fully enumerated finite subgroup of `SL_n(Z/m)`.
///
/// Elements are indexed in breadth-first discovery order starting from the
/// identity; index 0 is always the identity. The table is immutable after
/// construction and all scans over it are safe to parallelize.
#[derive(Debug, Clone)]
pub struct GroupTable {
    ring: ResidueRing,
    n: usize,
    elements: Vec<SquareMatrix>,
    index: HashMap<Vec<u64>, u32>,
    inverse: Vec<u32>,
    order: Vec<u64>,
    class_rep: Vec<u32>,
    class_reps: Vec<u32>,
    generators: Vec<u32>,
}

impl GroupTable {
    /// Breadth-first closure of the generators under multiplication. The
    /// generators must be unimodular; the closure of a finite set of finite-
    /// order elements automatically contains inverses and the identity.
    pub fn close_generators(
        ring: ResidueRing,
        n: usize,
        gens: &[SquareMatrix],
        cap: usize,
    ) -> Result<GroupTable, GroupError> {
        assert!(cap >= 1, "closure cap must be positive");
        for g in gens {
            if g.dim() != n {
                return Err(GroupError::DimensionMismatch(g.dim(), n));
            }
            if g.ring().modulus() != ring.modulus() {
                return Err(GroupError::MixedRings(g.ring().modulus(), ring.modulus()));
            }
            if !g.is_unimodular() {
                return Err(GroupError::NotUnimodular { det: g.det().value() });
            }
        }

        let identity = SquareMatrix::identity(ring, n);
        let mut elements = vec![identity.clone()];
        let mut index: HashMap<Vec<u64>, u32> = HashMap::new();
        index.insert(identity.entries.clone(), 0);
        let mut queue = VecDeque::from([0u32]);
        while let Some(i) = queue.pop_front() {
            for g in gens {
                let next = elements[i as usize].mul(g)?;
                if !index.contains_key(next.entries()) {
                    if elements.len() >= cap {
                        return Err(GroupError::ClosureCapExceeded { cap });
                    }
                    let id = elements.len() as u32;
                    index.insert(next.entries.clone(), id);
                    elements.push(next);
                    queue.push_back(id);
                }
            }
        }

        let gen_ids: Vec<u32> = gens
            .iter()
            .map(|g| index[g.entries()])
            .collect();

        let inverse: Vec<u32> = elements
            .iter()
            .map(|e| index[e.inverse().expect("closure elements are unimodular").entries()])
            .collect();

        let order: Vec<u64> = elements
            .iter()
            .map(|e| {
                let mut pow = e.clone();
                let mut ord = 1u64;
                while pow != identity {
                    pow = pow.mul(e).expect("same ring");
                    ord += 1;
                }
                ord
            })
            .collect();

        // Conjugacy classes by orbit enumeration under conjugation by the
        // generators (orbits of <gens> acting by conjugation are exactly the
        // conjugacy classes of the closed group).
        let mut class_rep = vec![u32::MAX; elements.len()];
        let mut class_reps = Vec::new();
        for start in 0..elements.len() as u32 {
            if class_rep[start as usize] != u32::MAX {
                continue;
            }
            class_reps.push(start);
            class_rep[start as usize] = start;
            let mut orbit = VecDeque::from([start]);
            while let Some(x) = orbit.pop_front() {
                for &g in &gen_ids {
                    let ginv = inverse[g as usize];
                    let conj = elements[g as usize]
                        .mul(&elements[x as usize])
                        .and_then(|m| m.mul(&elements[ginv as usize]))
                        .expect("same ring");
                    let y = index[conj.entries()];
                    if class_rep[y as usize] == u32::MAX {
                        class_rep[y as usize] = start;
                        orbit.push_back(y);
                    }
                }
            }
        }

        Ok(GroupTable {
            ring,
            n,
            elements,
            index,
            inverse,
            order,
            class_rep,
            class_reps,
            generators: gen_ids,
        })
    }

    pub fn ring(&self) -> ResidueRing {
        self.ring
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn identity_index(&self) -> u32 {
        0
    }

    pub fn element(&self, i: u32) -> &SquareMatrix {
        &self.elements[i as usize]
    }

    pub fn elements(&self) -> &[SquareMatrix] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.generators
    }

    pub fn index_of(&self, m: &SquareMatrix) -> Option<u32> {
        self.index.get(m.entries()).copied()
    }

    pub fn inverse_of(&self, i: u32) -> u32 {
        self.inverse[i as usize]
    }

    /// Least `e >= 1` with `g^e = I`.
    pub fn element_order(&self, i: u32) -> u64 {
        self.order[i as usize]
    }

    pub fn class_rep_of(&self, i: u32) -> u32 {
        self.class_rep[i as usize]
    }

    pub fn class_reps(&self) -> &[u32] {
        &self.class_reps
    }

    pub fn mul_idx(&self, a: u32, b: u32) -> u32 {
        let m = self.elements[a as usize]
            .mul(&self.elements[b as usize])
            .expect("same ring");
        self.index[m.entries()]
    }

    pub fn commutator_idx(&self, a: u32, b: u32) -> u32 {
        let ab = self.mul_idx(a, b);
        let ai = self.inverse[a as usize];
        let bi = self.inverse[b as usize];
        self.mul_idx(self.mul_idx(ab, ai), bi)
    }

    pub fn pow_idx(&self, i: u32, e: i64) -> u32 {
        let base = if e < 0 { self.inverse[i as usize] } else { i };
        let mut e = e.unsigned_abs();
        let mut acc = 0u32; // identity
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_idx(acc, b);
            }
            b = self.mul_idx(b, b);
            e >>= 1;
        }
        acc
    }

    /// The set `{ [a, b] : a, b in G }`, computed by scanning conjugacy-class
    /// representatives against all elements and closing the result under
    /// conjugation ([x,y] conjugated by g is [x^g, y^g], so the commutator
    /// set is a union of conjugacy classes).
    pub fn commutator_set(&self) -> BTreeSet<u32> {
        let mut set: BTreeSet<u32> = self
            .class_reps
            .par_iter()
            .map(|&r| {
                let mut local = BTreeSet::new();
                for b in 0..self.elements.len() as u32 {
                    local.insert(self.commutator_idx(r, b));
                }
                local
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            });

        // Close under conjugation by the generators.
        let mut frontier: Vec<u32> = set.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for &g in &self.generators {
                let y = self.mul_idx(self.mul_idx(g, x), self.inverse[g as usize]);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    /// Reference implementation: the full |G|^2 pair scan.
    pub fn commutator_set_exhaustive(&self) -> BTreeSet<u32> {
        (0..self.elements.len() as u32)
            .into_par_iter()
            .map(|a| {
                let mut local = BTreeSet::new();
                for b in 0..self.elements.len() as u32 {
                    local.insert(self.commutator_idx(a, b));
                }
                local
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    }

    /// Same set under the alternate convention `a^-1 b^-1 a b`.
    pub fn commutator_set_alt_convention(&self) -> BTreeSet<u32> {
        (0..self.elements.len() as u32)
            .into_par_iter()
            .map(|a| {
                let ai = self.inverse[a as usize];
                let mut local = BTreeSet::new();
                for b in 0..self.elements.len() as u32 {
                    let bi = self.inverse[b as usize];
                    local.insert(self.mul_idx(self.mul_idx(self.mul_idx(ai, bi), a), b));
                }
                local
            })
            .reduce(BTreeSet::new, |mut a, b| {
                a.extend(b);
                a
            })
    }

    /// Indices of all generators of the cyclic group `<g>`: the powers `g^u`
    /// with `gcd(u, order(g)) = 1`.
    pub fn cyclic_generators(&self, i: u32) -> BTreeSet<u32> {
        let d = self.order[i as usize];
        units_mod(d)
            .into_iter()
            .map(|u| self.pow_idx(i, u as i64))
            .collect()
    }

    /// Verifies the Honda property exhaustively: every generator of the
    /// cyclic group of every commutator must itself be a commutator.
    pub fn check_honda(&self) -> HondaReport {
        let commutators = self.commutator_set();
        let mut pairs_checked = 0u64;
        let mut counterexample = None;
        'outer: for &gamma in &commutators {
            for delta in self.cyclic_generators(gamma) {
                pairs_checked += 1;
                if !commutators.contains(&delta) {
                    counterexample = Some((
                        self.elements[gamma as usize].clone(),
                        self.elements[delta as usize].clone(),
                    ));
                    break 'outer;
                }
            }
        }
        HondaReport {
            pass: counterexample.is_none(),
            group_order: self.elements.len(),
            commutator_count: commutators.len(),
            pairs_checked,
            counterexample,
        }
    }

    /// Indices of the subgroup generated by the given seed elements,
    /// ascending.
    pub fn subgroup_closure(&self, seeds: &[u32]) -> Vec<u32> {
        let mut seen: BTreeSet<u32> = BTreeSet::from([0]);
        let mut queue: VecDeque<u32> = VecDeque::from([0]);
        while let Some(x) = queue.pop_front() {
            for &s in seeds {
                let y = self.mul_idx(x, s);
                if seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    /// Strong-Honda check for one pair: with `H = <a, b>` and
    /// `gamma = [a, b]`, every generator `delta` of `<gamma>` must admit
    /// witnesses `sigma, tau` inside `H` with `[sigma, tau] = delta`.
    pub fn check_strong_honda(&self, a: u32, b: u32) -> Result<StrongHondaReport, GroupError> {
        let order = self.elements.len();
        if a as usize >= order {
            return Err(GroupError::IndexOutOfRange(a as usize, order));
        }
        if b as usize >= order {
            return Err(GroupError::IndexOutOfRange(b as usize, order));
        }
        let h = self.subgroup_closure(&[a, b]);
        let gamma = self.commutator_idx(a, b);
        let gamma_order = self.order[gamma as usize];
        let mut certs = Vec::new();
        for delta in self.cyclic_generators(gamma) {
            let found = h.iter().find_map(|&s| {
                h.iter()
                    .find(|&&t| self.commutator_idx(s, t) == delta)
                    .map(|&t| (s, t))
            });
            match found {
                Some((s, t)) => certs.push(WitnessCert {
                    sigma: self.elements[s as usize].clone(),
                    tau: self.elements[t as usize].clone(),
                    target: self.elements[delta as usize].clone(),
                }),
                None => {
                    return Ok(StrongHondaReport {
                        pass: false,
                        subgroup_order: h.len(),
                        gamma_order,
                        certs,
                        failure: Some(self.elements[delta as usize].clone()),
                    })
                }
            }
        }
        Ok(StrongHondaReport {
            pass: true,
            subgroup_order: h.len(),
            gamma_order,
            certs,
            failure: None,
        })
    }

    /// First witness pair `(sigma, tau)` with `[sigma, tau] = delta` in scan
    /// order: conjugacy-class representatives against all elements first,
    /// then the full pair scan as a fallback. Deterministic regardless of
    /// worker count (minimum scan position wins).
    pub fn find_witness(&self, delta: u32) -> Option<WitnessCert> {
        let order = self.elements.len() as u32;
        let rep_hit = self
            .class_reps
            .par_iter()
            .enumerate()
            .filter_map(|(pos, &s)| {
                (0..order)
                    .find(|&t| self.commutator_idx(s, t) == delta)
                    .map(|t| (pos, s, t))
            })
            .min_by_key(|&(pos, _, t)| (pos, t));
        let hit = rep_hit.or_else(|| {
            (0..order)
                .into_par_iter()
                .filter_map(|s| {
                    (0..order)
                        .find(|&t| self.commutator_idx(s, t) == delta)
                        .map(|t| (s as usize, s, t))
                })
                .min_by_key(|&(pos, _, t)| (pos, t))
        });
        hit.map(|(_, s, t)| WitnessCert {
            sigma: self.elements[s as usize].clone(),
            tau: self.elements[t as usize].clone(),
            target: self.elements[delta as usize].clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(m: u64) -> ResidueRing {
        ResidueRing::new(m).unwrap()
    }

    fn elementary_gens(r: ResidueRing) -> Vec<SquareMatrix> {
        vec![
            SquareMatrix::new(r, 2, &[1, 1, 0, 1]).unwrap(),
            SquareMatrix::new(r, 2, &[1, 0, 1, 1]).unwrap(),
        ]
    }

    fn sl2(m: u64) -> GroupTable {
        let r = ring(m);
        GroupTable::close_generators(r, 2, &elementary_gens(r), DEFAULT_CLOSURE_CAP).unwrap()
    }

    /// Oracle: all det-1 matrices found by scanning the full m^4 space.
    fn sl2_by_scan(m: u64) -> Vec<SquareMatrix> {
        let r = ring(m);
        let mut out = Vec::new();
        let mut digits = [0u64; 4];
        loop {
            let mat = SquareMatrix::from_values(r, 2, digits.to_vec()).unwrap();
            if mat.is_unimodular() {
                out.push(mat);
            }
            let mut pos = 3;
            loop {
                digits[pos] += 1;
                if digits[pos] < m {
                    break;
                }
                digits[pos] = 0;
                if pos == 0 {
                    return out;
                }
                pos -= 1;
            }
        }
    }

    #[test]
    fn closure_matches_det_scan() {
        for m in [2u64, 3] {
            let g = sl2(m);
            let scan = sl2_by_scan(m);
            assert_eq!(g.order(), scan.len());
            for mat in &scan {
                assert!(g.index_of(mat).is_some());
            }
        }
        assert_eq!(sl2(2).order(), 6);
        assert_eq!(sl2(3).order(), 24);
    }

    #[test]
    fn empty_generators_give_trivial_group() {
        let g = GroupTable::close_generators(ring(7), 2, &[], 10).unwrap();
        assert_eq!(g.order(), 1);
        assert_eq!(g.element(0), &SquareMatrix::identity(ring(7), 2));
    }

    #[test]
    fn closure_cap_enforced() {
        let r = ring(5);
        let err = GroupTable::close_generators(r, 2, &elementary_gens(r), 10).unwrap_err();
        assert_eq!(err, GroupError::ClosureCapExceeded { cap: 10 });
    }

    #[test]
    fn non_unimodular_generator_rejected() {
        let r = ring(4);
        let bad = SquareMatrix::new(r, 2, &[2, 0, 0, 2]).unwrap();
        assert!(matches!(
            GroupTable::close_generators(r, 2, &[bad], 10),
            Err(GroupError::NotUnimodular { det: 0 })
        ));
    }

    #[test]
    fn element_orders() {
        let g2 = sl2(2);
        assert_eq!(g2.element_order(g2.identity_index()), 1);
        let e12 = SquareMatrix::new(ring(2), 2, &[1, 1, 0, 1]).unwrap();
        assert_eq!(g2.element_order(g2.index_of(&e12).unwrap()), 2);
        let g3 = sl2(3);
        let e12 = SquareMatrix::new(ring(3), 2, &[1, 1, 0, 1]).unwrap();
        assert_eq!(g3.element_order(g3.index_of(&e12).unwrap()), 3);
    }

    #[test]
    fn commutator_basics() {
        let r = ring(5);
        let i = SquareMatrix::identity(r, 2);
        let b = SquareMatrix::new(r, 2, &[1, 2, 0, 1]).unwrap();
        assert_eq!(commutator(&i, &b).unwrap(), i);
        assert_eq!(commutator(&b, &b).unwrap(), i);

        // Over F_2 the commutator of the two elementary matrices has order 3.
        let r2 = ring(2);
        let a = SquareMatrix::new(r2, 2, &[1, 1, 0, 1]).unwrap();
        let b = SquareMatrix::new(r2, 2, &[1, 0, 1, 1]).unwrap();
        let c = commutator(&a, &b).unwrap();
        let g = sl2(2);
        assert_eq!(g.element_order(g.index_of(&c).unwrap()), 3);
    }

    #[test]
    fn inverse_by_adjugate_over_nonfield() {
        let r = ring(8);
        let a = SquareMatrix::new(r, 2, &[3, 2, 1, 1]).unwrap();
        assert!(a.is_unimodular());
        let ai = a.inverse().unwrap();
        assert_eq!(a.mul(&ai).unwrap(), SquareMatrix::identity(r, 2));
        assert_eq!(ai.mul(&a).unwrap(), SquareMatrix::identity(r, 2));
    }

    #[test]
    fn commutator_set_of_sl2_f2() {
        // SL_2(F_2) is isomorphic to S_3: commutators are the identity plus
        // the two order-3 elements.
        let g = sl2(2);
        let set = g.commutator_set();
        assert_eq!(set.len(), 3);
        for &i in &set {
            assert!(g.element_order(i) == 1 || g.element_order(i) == 3);
        }
        assert_eq!(set, g.commutator_set_exhaustive());
    }

    #[test]
    fn commutator_set_matches_pair_scan() {
        for m in [2u64, 3, 4] {
            let g = sl2(m);
            assert_eq!(g.commutator_set(), g.commutator_set_exhaustive(), "m = {m}");
        }
    }

    #[test]
    fn commutator_set_convention_independent() {
        for m in [2u64, 3, 4] {
            let g = sl2(m);
            assert_eq!(g.commutator_set(), g.commutator_set_alt_convention());
        }
        // And on every corpus group, so the Honda verdicts cannot depend on
        // the convention choice.
        for entry in crate::cli::corpus::builtin_entries() {
            let g = entry.realize(DEFAULT_CLOSURE_CAP).unwrap();
            assert_eq!(
                g.commutator_set(),
                g.commutator_set_alt_convention(),
                "group {}",
                entry.name
            );
        }
    }

    #[test]
    fn cyclic_generators_examples() {
        let g = sl2(3);
        assert_eq!(
            g.cyclic_generators(g.identity_index()),
            BTreeSet::from([g.identity_index()])
        );
        // An order-2 element: only unit mod 2 is 1.
        let minus_i = SquareMatrix::new(ring(3), 2, &[2, 0, 0, 2]).unwrap();
        let mi = g.index_of(&minus_i).unwrap();
        assert_eq!(g.element_order(mi), 2);
        assert_eq!(g.cyclic_generators(mi), BTreeSet::from([mi]));
        // An order-6 element has exactly two cyclic generators: g and g^5.
        let order6 = (0..g.order() as u32).find(|&i| g.element_order(i) == 6).unwrap();
        let gens = g.cyclic_generators(order6);
        assert_eq!(gens, BTreeSet::from([order6, g.pow_idx(order6, 5)]));
        assert_eq!(gens.len(), 2);
    }

    #[test]
    fn cyclic_generators_symmetric() {
        let g = sl2(3);
        for i in 0..g.order() as u32 {
            for &j in &g.cyclic_generators(i) {
                assert!(g.cyclic_generators(j).contains(&i));
            }
        }
    }

    #[test]
    fn honda_holds_on_small_groups() {
        let trivial = GroupTable::close_generators(ring(2), 2, &[], 10).unwrap();
        assert!(trivial.check_honda().pass);
        assert!(sl2(3).check_honda().pass);
        assert!(sl2(4).check_honda().pass); // order 48
    }

    #[test]
    fn strong_honda_on_generator_pairs() {
        let g = sl2(2);
        let id = g.identity_index();
        let r = g.check_strong_honda(id, id).unwrap();
        assert!(r.pass);
        assert_eq!(r.subgroup_order, 1);

        let a = g.index_of(&SquareMatrix::new(ring(2), 2, &[1, 1, 0, 1]).unwrap()).unwrap();
        let b = g.index_of(&SquareMatrix::new(ring(2), 2, &[1, 0, 1, 1]).unwrap()).unwrap();
        let r = g.check_strong_honda(a, b).unwrap();
        assert!(r.pass);
        assert_eq!(r.subgroup_order, 6); // <a, b> is the whole group
        assert!(!r.certs.is_empty());
        for cert in &r.certs {
            assert!(cert.verify());
        }
    }

    #[test]
    fn find_witness_examples() {
        let g = sl2(2);
        let cert = g.find_witness(g.identity_index()).unwrap();
        assert_eq!(cert.sigma, *g.element(0));
        assert_eq!(cert.tau, *g.element(0));
        assert!(cert.verify());

        // Order-2 elements of SL_2(F_2) are not commutators.
        let order2 = (0..g.order() as u32).find(|&i| g.element_order(i) == 2).unwrap();
        assert!(g.find_witness(order2).is_none());

        // Order-3 elements are; the certificate re-verifies.
        let order3 = (0..g.order() as u32).find(|&i| g.element_order(i) == 3).unwrap();
        let cert = g.find_witness(order3).unwrap();
        assert!(cert.verify());
        assert_eq!(cert.target, *g.element(order3 as u32));
    }

    #[test]
    fn witnesses_verify_across_group() {
        let g = sl2(3);
        for &delta in &g.commutator_set() {
            let cert = g.find_witness(delta).expect("commutators have witnesses");
            assert!(cert.verify());
        }
    }

    #[test]
    fn pow_idx_matches_matrix_pow() {
        let g = sl2(3);
        for i in (0..g.order() as u32).step_by(5) {
            for e in -4i64..=4 {
                let via_idx = g.element(g.pow_idx(i, e)).clone();
                let direct = g.element(i).pow(e).unwrap();
                assert_eq!(via_idx, direct);
            }
        }
    }

    #[test]
    fn index_errors_reported() {
        let g = sl2(2);
        assert!(matches!(
            g.check_strong_honda(99, 0),
            Err(GroupError::IndexOutOfRange(99, 6))
        ));
    }
}
