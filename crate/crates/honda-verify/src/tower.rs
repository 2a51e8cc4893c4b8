//! Congruence towers `SL_n(Z/p) <- SL_n(Z/p^2) <- ... <- SL_n(Z/p^K)` with
//! entrywise reduction maps, level-wise Honda verification, and backtracking
//! witness lifting.
//!
//! Lifting makes the compactness existence argument effective at finite
//! depth: a commutator witness for `delta` at level 1 is extended level by
//! level through the reduction fibers, backtracking on dead ends; a full
//! trace certifies `[sigma_k, tau_k] = delta mod p^k` for every `k`.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::matgroup::{GroupError, GroupTable, HondaReport, SquareMatrix};
use crate::ring::{is_prime, ResidueRing};

/// Cap on the order of the top-level group.
pub const DEFAULT_TOWER_CAP: usize = 200_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TowerError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("tower needs at least one level")]
    NoLevels,
    #[error("top level would exceed the cap of {cap} elements (needs {required})")]
    CapExceeded { cap: usize, required: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// The tower of full special linear groups over `Z/p^k` for `k = 1..=K`.
#[derive(Debug)]
pub struct Tower {
    p: u64,
    n: usize,
    levels: Vec<GroupTable>,
    /// `reductions[k][i]` is the index at level `k+1` (1-based) of the
    /// entrywise reduction of element `i` of level `k+2`.
    reductions: Vec<Vec<u32>>,
    /// `fibers[k][j]` lists, ascending, the level-(k+2) indices reducing to
    /// element `j` of level `k+1`.
    fibers: Vec<Vec<Vec<u32>>>,
}

fn elementary_generators(ring: ResidueRing, n: usize) -> Vec<SquareMatrix> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let mut entries = vec![0i64; n * n];
            for d in 0..n {
                entries[d * n + d] = 1;
            }
            entries[i * n + j] = 1;
            gens.push(SquareMatrix::new(ring, n, &entries).expect("shape"));
        }
    }
    gens
}

impl Tower {
    /// Enumerates every level by generator closure (the elementary
    /// transvections generate `SL_n` over `Z/p^k`) and builds the reduction
    /// maps, verifying on the way that each is a surjective homomorphism
    /// with constant fiber size `p^(n^2 - 1)`.
    pub fn build(p: u64, n: usize, levels: usize) -> Result<Tower, TowerError> {
        Tower::build_with_cap(p, n, levels, DEFAULT_TOWER_CAP)
    }

    pub fn build_with_cap(p: u64, n: usize, levels: usize, cap: usize) -> Result<Tower, TowerError> {
        if !is_prime(p) {
            return Err(TowerError::NotPrime(p));
        }
        if levels == 0 {
            return Err(TowerError::NoLevels);
        }
        // |SL_n(Z/p^k)| = |SL_n(F_p)| * p^((n^2-1)(k-1)); reject before
        // enumerating if the top level cannot fit.
        let base: u64 = sl_order_prime(p, n);
        let fiber = p.pow((n * n - 1) as u32);
        let mut required = base;
        for _ in 1..levels {
            required = required.saturating_mul(fiber);
        }
        if required > cap as u64 {
            return Err(TowerError::CapExceeded { cap, required });
        }

        let mut tables = Vec::with_capacity(levels);
        for k in 1..=levels {
            let modulus = p.pow(k as u32);
            let ring = ResidueRing::new(modulus).expect("p^k >= 2");
            let gens = elementary_generators(ring, n);
            tables.push(GroupTable::close_generators(ring, n, &gens, cap)?);
        }

        let mut reductions = Vec::new();
        let mut fibers = Vec::new();
        for k in 0..levels - 1 {
            let small = &tables[k];
            let big = &tables[k + 1];
            let small_ring = small.ring();
            let mut map = Vec::with_capacity(big.order());
            let mut fiber_lists: Vec<Vec<u32>> = vec![Vec::new(); small.order()];
            for i in 0..big.order() as u32 {
                let reduced = big.element(i).reduce(small_ring);
                let j = small
                    .index_of(&reduced)
                    .expect("reduction of a unimodular matrix is unimodular");
                map.push(j);
                fiber_lists[j as usize].push(i);
            }
            reductions.push(map);
            fibers.push(fiber_lists);
        }

        Ok(Tower {
            p,
            n,
            levels: tables,
            reductions,
            fibers,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// The group at 1-based level `k` (`Z/p^k` entries).
    pub fn level(&self, k: usize) -> &GroupTable {
        &self.levels[k - 1]
    }

    pub fn top(&self) -> &GroupTable {
        self.levels.last().expect("at least one level")
    }

    /// Expected constant fiber size of each reduction map.
    pub fn fiber_size(&self) -> u64 {
        self.p.pow((self.n * self.n - 1) as u32)
    }

    /// Index at level `k` of the reduction of element `i` of level `k+1`.
    pub fn reduce_one(&self, k: usize, i: u32) -> u32 {
        self.reductions[k - 1][i as usize]
    }

    /// Reduction of a top-level element to every level, top to bottom
    /// excluded; entry `[k-1]` is the index at level `k`.
    pub fn reduce_to_all_levels(&self, top_index: u32) -> Vec<u32> {
        let depth = self.depth();
        let mut out = vec![0u32; depth];
        out[depth - 1] = top_index;
        for k in (1..depth).rev() {
            out[k - 1] = self.reduce_one(k, out[k]);
        }
        out
    }

    /// Preimages at level `k+1` of element `j` of level `k`, ascending.
    pub fn fiber(&self, k: usize, j: u32) -> &[u32] {
        &self.fibers[k - 1][j as usize]
    }

    /// Honda check on one level.
    pub fn level_honda(&self, k: usize) -> HondaReport {
        self.level(k).check_honda()
    }

    /// Lifts a commutator witness for the given top-level target through
    /// every level by depth-first search over reduction fibers in canonical
    /// index order. Deterministic; returns the trace or the level at which
    /// the search space was exhausted.
    pub fn lift_witness(&self, delta_top: u32) -> LiftOutcome {
        let depth = self.depth();
        let deltas = self.reduce_to_all_levels(delta_top);
        let level1 = &self.levels[0];

        // All witness pairs at level 1, scanned lazily in index order.
        let order1 = level1.order() as u32;
        let mut backtracks = 0u64;
        for s1 in 0..order1 {
            for t1 in 0..order1 {
                if level1.commutator_idx(s1, t1) != deltas[0] {
                    continue;
                }
                let mut chain = vec![(s1, t1)];
                if self.extend(&deltas, &mut chain, &mut backtracks) {
                    return LiftOutcome::Found(self.trace_from_chain(delta_top, &deltas, chain, backtracks));
                }
                backtracks += 1;
            }
        }
        if depth == 1 {
            LiftOutcome::NotCommutatorAtLevel { level: 1, backtracks }
        } else {
            // Exhausted every level-1 seed: either the target is not a
            // commutator at level 1 or (never observed) lifting failed.
            let base_ok = (0..order1).any(|s| {
                (0..order1).any(|t| level1.commutator_idx(s, t) == deltas[0])
            });
            if base_ok {
                LiftOutcome::Exhausted { level: 1, backtracks }
            } else {
                LiftOutcome::NotCommutatorAtLevel { level: 1, backtracks }
            }
        }
    }

    fn extend(&self, deltas: &[u32], chain: &mut Vec<(u32, u32)>, backtracks: &mut u64) -> bool {
        let k = chain.len(); // chain covers levels 1..=k
        if k == self.depth() {
            return true;
        }
        let (sk, tk) = *chain.last().expect("chain is never empty");
        let big = &self.levels[k];
        let target = deltas[k];
        for &s in self.fiber(k, sk) {
            for &t in self.fiber(k, tk) {
                if big.commutator_idx(s, t) == target {
                    chain.push((s, t));
                    if self.extend(deltas, chain, backtracks) {
                        return true;
                    }
                    chain.pop();
                    *backtracks += 1;
                }
            }
        }
        false
    }

    fn trace_from_chain(
        &self,
        delta_top: u32,
        deltas: &[u32],
        chain: Vec<(u32, u32)>,
        backtracks: u64,
    ) -> LiftTrace {
        let levels = chain
            .iter()
            .enumerate()
            .map(|(k, &(s, t))| {
                let table = &self.levels[k];
                LiftLevel {
                    modulus: table.ring().modulus(),
                    delta: table.element(deltas[k]).clone(),
                    sigma: table.element(s).clone(),
                    tau: table.element(t).clone(),
                }
            })
            .collect();
        LiftTrace {
            delta_top,
            levels,
            backtracks,
        }
    }

    /// Lifts every target in the given list, in parallel, preserving input
    /// order in the output.
    pub fn lift_many(&self, targets: &[u32]) -> Vec<(u32, LiftOutcome)> {
        targets
            .par_iter()
            .map(|&delta| (delta, self.lift_witness(delta)))
            .collect()
    }

    /// At the top level: if `<delta> = <gamma>` and `gamma` is a commutator
    /// there, `delta` must be one too. At finite depth the closure of a
    /// cyclic subgroup is the subgroup itself, so this is the cyclic-
    /// generator comparison.
    pub fn closure_variant_check(&self, gamma: u32, delta: u32) -> ClosureVariantReport {
        let top = self.top();
        let commutators = top.commutator_set();
        let same_cyclic = top.cyclic_generators(gamma).contains(&delta);
        let qualifying = same_cyclic && commutators.contains(&gamma);
        let pass = !qualifying || commutators.contains(&delta);
        ClosureVariantReport {
            qualifying,
            pass,
        }
    }
}

fn sl_order_prime(p: u64, n: usize) -> u64 {
    // |SL_n(F_p)| = p^(n(n-1)/2) * prod_{k=2..=n} (p^k - 1)
    let mut order = p.pow((n * (n - 1) / 2) as u32);
    for k in 2..=n as u32 {
        order *= p.pow(k) - 1;
    }
    order
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftLevel {
    pub modulus: u64,
    pub delta: SquareMatrix,
    pub sigma: SquareMatrix,
    pub tau: SquareMatrix,
}

/// A per-level commutator certificate chain for one top-level target.
#[derive(Debug, Clone, Serialize)]
pub struct LiftTrace {
    pub delta_top: u32,
    pub levels: Vec<LiftLevel>,
    pub backtracks: u64,
}

impl LiftTrace {
    /// Re-verifies `[sigma_k, tau_k] = delta_k` at every level by direct
    /// multiplication, and that each level's data reduces to the previous.
    pub fn verify(&self) -> bool {
        use crate::matgroup::commutator;
        for (k, level) in self.levels.iter().enumerate() {
            match commutator(&level.sigma, &level.tau) {
                Ok(c) if c == level.delta => {}
                _ => return false,
            }
            if k > 0 {
                let prev_ring = ResidueRing::new(self.levels[k - 1].modulus).expect("modulus");
                if level.delta.reduce(prev_ring) != self.levels[k - 1].delta {
                    return false;
                }
            }
        }
        true
    }
}

#[derive(Debug, Clone, Serialize)]
pub enum LiftOutcome {
    Found(LiftTrace),
    NotCommutatorAtLevel { level: usize, backtracks: u64 },
    Exhausted { level: usize, backtracks: u64 },
}

impl LiftOutcome {
    pub fn trace(&self) -> Option<&LiftTrace> {
        match self {
            LiftOutcome::Found(t) => Some(t),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosureVariantReport {
    pub qualifying: bool,
    pub pass: bool,
}

/// Verification data for the reduction maps of a tower, used by tests and
/// the command-line report.
#[derive(Debug, Clone, Serialize)]
pub struct ReductionCheck {
    pub level_sizes: Vec<usize>,
    pub fiber_size: u64,
    pub surjective: bool,
    pub constant_fibers: bool,
    pub homomorphism_pairs_checked: u64,
    pub homomorphism_ok: bool,
}

/// Checks surjectivity, constant fiber size and the homomorphism law on
/// every reduction map: exhaustively when the upper level has at most
/// `exhaustive_limit` elements, on a deterministic stride sample otherwise.
pub fn check_reductions(tower: &Tower, exhaustive_limit: usize) -> ReductionCheck {
    let mut surjective = true;
    let mut constant_fibers = true;
    let mut pairs = 0u64;
    let mut hom_ok = true;
    let expected_fiber = tower.fiber_size();
    for k in 1..tower.depth() {
        let small = tower.level(k);
        let big = tower.level(k + 1);

        let mut seen = vec![0u64; small.order()];
        for i in 0..big.order() as u32 {
            seen[tower.reduce_one(k, i) as usize] += 1;
        }
        surjective &= seen.iter().all(|&c| c > 0);
        constant_fibers &= seen.iter().all(|&c| c == expected_fiber);

        let order = big.order() as u32;
        let step = if (order as usize) <= exhaustive_limit {
            1
        } else {
            (order / 64).max(1)
        };
        let mut a = 0u32;
        while a < order {
            let mut b = 0u32;
            while b < order {
                let lhs = tower.reduce_one(k, big.mul_idx(a, b));
                let rhs = small.mul_idx(tower.reduce_one(k, a), tower.reduce_one(k, b));
                hom_ok &= lhs == rhs;
                pairs += 1;
                b += step;
            }
            a += step;
        }
    }
    ReductionCheck {
        level_sizes: (1..=tower.depth()).map(|k| tower.level(k).order()).collect(),
        fiber_size: expected_fiber,
        surjective,
        constant_fibers,
        homomorphism_pairs_checked: pairs,
        homomorphism_ok: hom_ok,
    }
}

/// Fiber enumeration the arithmetic way: lifts of the entries by all
/// multiples of `p^k`, filtered by unimodularity. Used to cross-check the
/// table-derived fibers.
pub fn arithmetic_fiber(tower: &Tower, k: usize, j: u32) -> Vec<u32> {
    let small = tower.level(k);
    let big = tower.level(k + 1);
    let n = tower.n();
    let base = small.element(j).entries().to_vec();
    let step = small.ring().modulus();
    let p = tower.p();
    let vars = n * n;
    let mut out = Vec::new();
    let mut offsets = vec![0u64; vars];
    loop {
        let entries: Vec<u64> = base
            .iter()
            .zip(&offsets)
            .map(|(&e, &o)| e + o * step)
            .collect();
        let mat = SquareMatrix::from_values(big.ring(), n, entries).expect("shape");
        if mat.is_unimodular() {
            if let Some(idx) = big.index_of(&mat) {
                out.push(idx);
            }
        }
        // Odometer over the p^(n^2) raw lifts.
        let mut pos = vars;
        loop {
            if pos == 0 {
                out.sort_unstable();
                return out;
            }
            pos -= 1;
            offsets[pos] += 1;
            if offsets[pos] < p {
                break;
            }
            offsets[pos] = 0;
        }
    }
}

/// JSON-exportable summary of a batch of lifts.
#[derive(Debug, Clone, Serialize)]
pub struct LiftBatchReport {
    pub p: u64,
    pub n: usize,
    pub depth: usize,
    pub targets: usize,
    pub lifted: usize,
    pub total_backtracks: u64,
    pub failures: Vec<u32>,
    pub traces: Vec<LiftTrace>,
}

/// Lifts every top-level element generating the same cyclic group as some
/// commutator (the full set the Honda property speaks about).
pub fn lift_all_cyclic_targets(tower: &Tower) -> LiftBatchReport {
    let top = tower.top();
    let commutators = top.commutator_set();
    let mut target_set: BTreeSet<u32> = BTreeSet::new();
    for &gamma in &commutators {
        target_set.extend(top.cyclic_generators(gamma));
    }
    let targets: Vec<u32> = target_set.into_iter().collect();
    let outcomes = tower.lift_many(&targets);
    let mut lifted = 0;
    let mut backtracks = 0;
    let mut failures = Vec::new();
    let mut traces = Vec::new();
    for (delta, outcome) in outcomes {
        match outcome {
            LiftOutcome::Found(trace) => {
                lifted += 1;
                backtracks += trace.backtracks;
                traces.push(trace);
            }
            _ => failures.push(delta),
        }
    }
    LiftBatchReport {
        p: tower.p(),
        n: tower.n(),
        depth: tower.depth(),
        targets: targets.len(),
        lifted,
        total_backtracks: backtracks,
        failures,
        traces,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_sizes_p2() {
        let tower = Tower::build(2, 2, 3).unwrap();
        let sizes: Vec<usize> = (1..=3).map(|k| tower.level(k).order()).collect();
        assert_eq!(sizes, vec![6, 48, 384]);
        // Fiber-count invariant: 6 * 8 = 48, 48 * 8 = 384.
        assert_eq!(tower.fiber_size(), 8);
    }

    #[test]
    fn tower_sizes_p3() {
        let tower = Tower::build(3, 2, 2).unwrap();
        assert_eq!(tower.level(1).order(), 24);
        assert_eq!(tower.level(2).order(), 648);
        assert_eq!(tower.fiber_size(), 27);
    }

    #[test]
    fn invalid_towers_rejected() {
        assert_eq!(Tower::build(4, 2, 2).unwrap_err(), TowerError::NotPrime(4));
        assert_eq!(Tower::build(2, 2, 0).unwrap_err(), TowerError::NoLevels);
        assert!(matches!(
            Tower::build_with_cap(2, 2, 8, 1000).unwrap_err(),
            TowerError::CapExceeded { cap: 1000, .. }
        ));
    }

    #[test]
    fn identity_reduces_to_identity() {
        let tower = Tower::build(2, 2, 3).unwrap();
        let top_id = tower.top().identity_index();
        let all = tower.reduce_to_all_levels(top_id);
        for (k, &idx) in all.iter().enumerate() {
            assert_eq!(idx, tower.level(k + 1).identity_index());
        }
    }

    #[test]
    fn reductions_verified() {
        let tower = Tower::build(2, 2, 3).unwrap();
        let check = check_reductions(&tower, 48);
        assert!(check.surjective);
        assert!(check.constant_fibers);
        assert!(check.homomorphism_ok);
        assert_eq!(check.level_sizes, vec![6, 48, 384]);
    }

    #[test]
    fn reduction_commutes_with_commutator() {
        let tower = Tower::build(2, 2, 2).unwrap();
        let big = tower.level(2);
        let small = tower.level(1);
        for a in 0..big.order() as u32 {
            for b in 0..big.order() as u32 {
                let lhs = tower.reduce_one(1, big.commutator_idx(a, b));
                let rhs = small.commutator_idx(tower.reduce_one(1, a), tower.reduce_one(1, b));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn arithmetic_fibers_match_table_fibers() {
        let tower = Tower::build(2, 2, 3).unwrap();
        for k in 1..tower.depth() {
            for j in 0..tower.level(k).order() as u32 {
                assert_eq!(arithmetic_fiber(&tower, k, j), tower.fiber(k, j));
            }
        }
    }

    #[test]
    fn level_honda_passes() {
        let tower = Tower::build(2, 2, 3).unwrap();
        for k in 1..=3 {
            assert!(tower.level_honda(k).pass, "level {k}");
        }
    }

    #[test]
    fn identity_lifts_without_backtracking() {
        let tower = Tower::build(2, 2, 3).unwrap();
        let outcome = tower.lift_witness(tower.top().identity_index());
        let trace = outcome.trace().expect("identity is a commutator");
        assert_eq!(trace.backtracks, 0);
        assert!(trace.verify());
        for level in &trace.levels {
            let ring = level.sigma.ring();
            assert_eq!(level.sigma, SquareMatrix::identity(ring, 2));
            assert_eq!(level.tau, SquareMatrix::identity(ring, 2));
        }
    }

    #[test]
    fn every_top_commutator_lifts() {
        let tower = Tower::build(2, 2, 3).unwrap();
        let top = tower.top();
        for &delta in &top.commutator_set() {
            let outcome = tower.lift_witness(delta);
            let trace = outcome.trace().unwrap_or_else(|| panic!("delta {delta} must lift"));
            assert!(trace.verify());
        }
    }

    #[test]
    fn closure_variant_small() {
        let tower = Tower::build(2, 2, 2).unwrap();
        let top = tower.top();
        let id = top.identity_index();
        let report = tower.closure_variant_check(id, id);
        assert!(report.qualifying);
        assert!(report.pass);
        for gamma in 0..top.order() as u32 {
            for delta in 0..top.order() as u32 {
                assert!(tower.closure_variant_check(gamma, delta).pass);
            }
        }
    }

    #[test]
    fn closure_variant_p3_all_qualifying_pairs() {
        // Exhaustive over the qualifying pairs at the top of the p = 3 tower,
        // with the commutator set computed once (the per-call API recomputes
        // it, which is fine for single queries but not for 648^2 pairs).
        let tower = Tower::build(3, 2, 2).unwrap();
        let top = tower.top();
        let commutators = top.commutator_set();
        let mut qualifying = 0u64;
        for &gamma in &commutators {
            for delta in top.cyclic_generators(gamma) {
                qualifying += 1;
                assert!(
                    commutators.contains(&delta),
                    "delta {delta} generating <{gamma}> is not a commutator"
                );
            }
        }
        assert!(qualifying > 0);
        // Spot-check the per-call API against the cached sweep.
        for gamma in (0..top.order() as u32).step_by(37) {
            for delta in (0..top.order() as u32).step_by(41) {
                let report = tower.closure_variant_check(gamma, delta);
                let expected_qualifying = commutators.contains(&gamma)
                    && top.cyclic_generators(gamma).contains(&delta);
                assert_eq!(report.qualifying, expected_qualifying);
                assert!(report.pass);
            }
        }
    }

    #[test]
    fn non_commutator_reported_at_base() {
        // Over SL_2(F_2) order-2 elements are not commutators; a K = 1 tower
        // reports the failing level immediately.
        let tower = Tower::build(2, 2, 1).unwrap();
        let top = tower.top();
        let order2 = (0..top.order() as u32)
            .find(|&i| top.element_order(i) == 2)
            .unwrap();
        match tower.lift_witness(order2) {
            LiftOutcome::NotCommutatorAtLevel { level: 1, .. } => {}
            other => panic!("unexpected outcome {other:?}"),
        }
    }
}
