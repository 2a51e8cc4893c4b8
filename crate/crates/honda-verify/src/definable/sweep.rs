//! Parameter-space sweeps: semantic evaluation of the subgroup-commutator
//! sentence, the direct subgroup-by-subgroup criterion check, and the
//! dual-evaluator comparison of the formula guard against its semantic
//! mirror.
//!
//! All sweeps are data-parallel over alpha tuples with order-insensitive
//! merges (counts are summed, counterexamples keep the minimum canonical
//! index), so results are byte-identical at any worker count.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::formulas::{build_guard, parameter_syms};
use super::{DefinableError, MonomialBasis, PointSpace, PsiParams};
use crate::folang::eval::NaiveEvaluator;
use crate::folang::Sym;
use crate::ring::ResidueRing;

/// Cap on the number of alpha tuples an exhaustive sweep may visit.
pub const MAX_EXHAUSTIVE_ALPHAS: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepMode {
    Exhaustive,
    Sampled { seed: u64, count: u64 },
}

/// The alpha tuples a sweep visits, addressable by canonical index.
struct AlphaSpace {
    m: u64,
    digit_count: usize,
    total: u64,
    /// Pre-generated tuples for sampled mode (sample order is the canonical
    /// order there); exhaustive mode decodes the index odometer-style.
    samples: Option<Vec<u64>>,
}

impl AlphaSpace {
    fn build(ring: &ResidueRing, c: usize, mode: SweepMode) -> Result<AlphaSpace, DefinableError> {
        let digit_count = c * c;
        let m = ring.modulus();
        match mode {
            SweepMode::Exhaustive => {
                let bits = (digit_count as f64) * (m as f64).log2();
                let total = if bits > 62.0 {
                    u64::MAX
                } else {
                    (m as u128).pow(digit_count as u32) as u64
                };
                if total > MAX_EXHAUSTIVE_ALPHAS {
                    return Err(DefinableError::ExhaustiveCapExceeded {
                        alpha_count_bits: bits.ceil() as u32,
                        cap: MAX_EXHAUSTIVE_ALPHAS,
                    });
                }
                Ok(AlphaSpace {
                    m,
                    digit_count,
                    total,
                    samples: None,
                })
            }
            SweepMode::Sampled { seed, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut samples = Vec::with_capacity((count as usize) * digit_count);
                for _ in 0..count {
                    for _ in 0..digit_count {
                        samples.push(rng.gen_range(0..m));
                    }
                }
                Ok(AlphaSpace {
                    m,
                    digit_count,
                    total: count,
                    samples: Some(samples),
                })
            }
        }
    }

    fn digits(&self, index: u64, out: &mut [u64]) {
        match &self.samples {
            Some(samples) => {
                let start = index as usize * self.digit_count;
                out.copy_from_slice(&samples[start..start + self.digit_count]);
            }
            None => super::decode_point(index, self.m, out),
        }
    }
}

/// Per-member-set aggregate over all visited alphas realizing it.
#[derive(Debug, Clone)]
struct SetAgg {
    alphas: u64,
    guard_true: u64,
    min_alpha: u64,
    min_guard_alpha: Option<u64>,
}

impl SetAgg {
    fn merge(&mut self, other: &SetAgg) {
        self.alphas += other.alphas;
        self.guard_true += other.guard_true;
        self.min_alpha = self.min_alpha.min(other.min_alpha);
        self.min_guard_alpha = match (self.min_guard_alpha, other.min_guard_alpha) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
    }
}

/// Scratch for one worker: the vanishing set as both bitset and list.
struct Scratch {
    digits: Vec<u64>,
    van_bits: Vec<u64>,
    van_list: Vec<u32>,
}

impl Scratch {
    fn new(space: &PointSpace) -> Scratch {
        Scratch {
            digits: vec![0; space.basis().c() * space.basis().c()],
            van_bits: vec![0; space.len().div_ceil(64)],
            van_list: Vec::with_capacity(space.len()),
        }
    }

    #[inline]
    fn has(&self, p: u32) -> bool {
        self.van_bits[(p / 64) as usize] >> (p % 64) & 1 == 1
    }
}

/// Computes the vanishing set of the current digits and returns the sorted
/// member list (unimodular vanishing points).
fn analyze_members(space: &PointSpace, scratch: &mut Scratch) -> Vec<u32> {
    scratch.van_bits.fill(0);
    scratch.van_list.clear();
    let mut members = Vec::new();
    for p in 0..space.len() as u32 {
        if space.vanishes(p, &scratch.digits) {
            scratch.van_bits[(p / 64) as usize] |= 1 << (p % 64);
            scratch.van_list.push(p);
            if space.is_unimodular(p) {
                members.push(p);
            }
        }
    }
    members
}

/// Semantic mirror of the guard `phi & chi & eta` on the current scratch:
/// identity vanishes, inverses of members vanish, and the vanishing set is
/// closed under products.
fn guard_semantic(space: &PointSpace, scratch: &Scratch, members: &[u32]) -> bool {
    if !scratch.has(space.identity()) {
        return false;
    }
    for &u in members {
        let inv = space.inverse(u).expect("members are unimodular");
        if !scratch.has(inv) {
            return false;
        }
    }
    for &u in &scratch.van_list {
        for &v in &scratch.van_list {
            if !scratch.has(space.mul(u, v)) {
                return false;
            }
        }
    }
    true
}

/// One full pass over the alpha space, bucketing alphas by realized member
/// set. This is the shared engine behind the sentence evaluation and the
/// criterion check.
fn aggregate_sweep(
    space: &Arc<PointSpace>,
    mode: SweepMode,
) -> Result<(BTreeMap<Vec<u32>, SetAgg>, u64), DefinableError> {
    let alpha_space = AlphaSpace::build(&space.ring(), space.basis().c(), mode)?;
    let total = alpha_space.total;
    let chunk = 1u64 << 16;
    let chunk_count = total.div_ceil(chunk).max(1);

    let merged = (0..chunk_count)
        .into_par_iter()
        .fold(
            || (HashMap::<Vec<u32>, SetAgg>::new(), Scratch::new(space)),
            |(mut map, mut scratch), k| {
                let lo = k * chunk;
                let hi = (lo + chunk).min(total);
                for idx in lo..hi {
                    alpha_space.digits(idx, &mut scratch.digits);
                    let members = analyze_members(space, &mut scratch);
                    let guard = guard_semantic(space, &scratch, &members);
                    match map.get_mut(&members) {
                        Some(agg) => {
                            agg.alphas += 1;
                            agg.min_alpha = agg.min_alpha.min(idx);
                            if guard {
                                agg.guard_true += 1;
                                agg.min_guard_alpha = Some(match agg.min_guard_alpha {
                                    Some(a) => a.min(idx),
                                    None => idx,
                                });
                            }
                        }
                        None => {
                            map.insert(
                                members,
                                SetAgg {
                                    alphas: 1,
                                    guard_true: guard as u64,
                                    min_alpha: idx,
                                    min_guard_alpha: guard.then_some(idx),
                                },
                            );
                        }
                    }
                }
                (map, scratch)
            },
        )
        .map(|(map, _)| map)
        .reduce(HashMap::new, |mut a, b| {
            for (key, agg) in b {
                match a.get_mut(&key) {
                    Some(existing) => existing.merge(&agg),
                    None => {
                        a.insert(key, agg);
                    }
                }
            }
            a
        });

    Ok((merged.into_iter().collect(), total))
}

/// Outcome of the commutator-power scan inside one member set.
struct InnerScan {
    ok: bool,
    qualifying: u64,
    failure: Option<(u32, u32)>,
}

/// For every commutator `gamma` of the member set: if `delta = gamma^s`
/// satisfies `delta^t = gamma`, then `delta` must itself be a commutator of
/// the set.
fn inner_scan(space: &PointSpace, members: &[u32], s: i64, t: i64) -> InnerScan {
    let mut commutators = BTreeSet::new();
    for &a in members {
        let ai = space.inverse(a).expect("unimodular");
        for &b in members {
            let bi = space.inverse(b).expect("unimodular");
            commutators.insert(space.mul(space.mul(space.mul(a, b), ai), bi));
        }
    }
    let mut qualifying = 0;
    for &gamma in &commutators {
        let delta = space.pow(gamma, s).expect("commutators are unimodular");
        let back = space.pow(delta, t).expect("powers of unimodular points are unimodular");
        if back == gamma {
            qualifying += 1;
            if !commutators.contains(&delta) {
                return InnerScan {
                    ok: false,
                    qualifying,
                    failure: Some((gamma, delta)),
                };
            }
        }
    }
    InnerScan {
        ok: true,
        qualifying,
        failure: None,
    }
}

/// A concrete falsifying datum: the parameter tuple plus the commutator
/// `gamma` and the power `delta` missing a witness.
#[derive(Debug, Clone, Serialize)]
pub struct SweepCounterexample {
    pub alpha: Vec<u64>,
    pub gamma: Vec<u64>,
    pub delta: Vec<u64>,
}

/// Result of semantically evaluating the sentence over one ring.
#[derive(Debug, Clone, Serialize)]
pub struct PsiEvalReport {
    pub truth: bool,
    pub alphas_visited: u64,
    pub guard_true_alphas: u64,
    pub distinct_member_sets: u64,
    pub distinct_guarded_subgroups: u64,
    pub triples_checked: u64,
    pub counterexample: Option<SweepCounterexample>,
}

/// Semantic evaluation of the sentence: sweep every alpha, gate on the
/// semantic guard mirror, and scan commutator powers inside each guarded
/// subgroup. Agrees with the formula-level evaluator wherever both run.
pub fn eval_psi_semantic(
    ring: ResidueRing,
    params: &PsiParams,
    mode: SweepMode,
) -> Result<PsiEvalReport, DefinableError> {
    let basis = MonomialBasis::build_low_degree(params.n, params.r)?;
    let space = PointSpace::build(ring, &basis)?;
    let (sets, total) = aggregate_sweep(&space, mode)?;

    let mut guard_true_alphas = 0;
    let mut guarded_sets = 0;
    let mut triples = 0;
    let mut failure: Option<(u64, u32, u32)> = None;
    for (members, agg) in &sets {
        guard_true_alphas += agg.guard_true;
        if agg.guard_true == 0 {
            continue;
        }
        guarded_sets += 1;
        let scan = inner_scan(&space, members, params.s, params.t);
        triples += scan.qualifying;
        if !scan.ok {
            let alpha_idx = agg.min_guard_alpha.expect("guard_true > 0");
            let (gamma, delta) = scan.failure.expect("failed scan carries a witness");
            if failure.map(|(a, _, _)| alpha_idx < a).unwrap_or(true) {
                failure = Some((alpha_idx, gamma, delta));
            }
        }
    }

    let counterexample = failure.map(|(idx, gamma, delta)| {
        let alpha_space = AlphaSpace::build(&ring, basis.c(), mode).expect("mode already validated");
        let mut digits = vec![0; basis.c() * basis.c()];
        alpha_space.digits(idx, &mut digits);
        SweepCounterexample {
            alpha: digits,
            gamma: space.point_entries(gamma),
            delta: space.point_entries(delta),
        }
    });

    Ok(PsiEvalReport {
        truth: counterexample.is_none(),
        alphas_visited: total,
        guard_true_alphas,
        distinct_member_sets: sets.len() as u64,
        distinct_guarded_subgroups: guarded_sets,
        triples_checked: triples,
        counterexample,
    })
}

/// Result of the direct subgroup-by-subgroup criterion check.
#[derive(Debug, Clone, Serialize)]
pub struct DaggerReport {
    pub pass: bool,
    pub alphas_visited: u64,
    pub group_alphas: u64,
    pub guard_true_alphas: u64,
    pub distinct_member_sets: u64,
    pub distinct_groups: u64,
    pub triples_checked: u64,
    pub witnesses_found: u64,
    /// Alphas whose guard mirror held but whose members do not form a group.
    /// The guard provably implies groupness, so anything nonzero here is a
    /// bug detector.
    pub guard_group_mismatches: u64,
    pub counterexample: Option<SweepCounterexample>,
}

/// The criterion check: every visited alpha whose members form a group must
/// satisfy the commutator-power condition inside that group.
pub fn dagger_check(
    ring: ResidueRing,
    params: &PsiParams,
    mode: SweepMode,
) -> Result<DaggerReport, DefinableError> {
    let basis = MonomialBasis::build_low_degree(params.n, params.r)?;
    let space = PointSpace::build(ring, &basis)?;
    let (sets, total) = aggregate_sweep(&space, mode)?;

    let mut group_alphas = 0;
    let mut guard_true_alphas = 0;
    let mut distinct_groups = 0;
    let mut triples = 0;
    let mut witnesses = 0;
    let mut mismatches = 0;
    let mut failure: Option<(u64, u32, u32)> = None;
    for (members, agg) in &sets {
        guard_true_alphas += agg.guard_true;
        let is_group = members_form_group(&space, members);
        if agg.guard_true > 0 && !is_group {
            mismatches += agg.guard_true;
        }
        if !is_group {
            continue;
        }
        group_alphas += agg.alphas;
        distinct_groups += 1;
        let scan = inner_scan(&space, members, params.s, params.t);
        triples += scan.qualifying;
        if scan.ok {
            witnesses += scan.qualifying;
        } else {
            let (gamma, delta) = scan.failure.expect("failed scan carries a witness");
            if failure.map(|(a, _, _)| agg.min_alpha < a).unwrap_or(true) {
                failure = Some((agg.min_alpha, gamma, delta));
            }
        }
    }

    let counterexample = failure.map(|(idx, gamma, delta)| {
        let alpha_space = AlphaSpace::build(&ring, basis.c(), mode).expect("mode already validated");
        let mut digits = vec![0; basis.c() * basis.c()];
        alpha_space.digits(idx, &mut digits);
        SweepCounterexample {
            alpha: digits,
            gamma: space.point_entries(gamma),
            delta: space.point_entries(delta),
        }
    });

    Ok(DaggerReport {
        pass: counterexample.is_none() && mismatches == 0,
        alphas_visited: total,
        group_alphas,
        guard_true_alphas,
        distinct_member_sets: sets.len() as u64,
        distinct_groups,
        triples_checked: triples,
        witnesses_found: witnesses,
        guard_group_mismatches: mismatches,
        counterexample,
    })
}

fn members_form_group(space: &PointSpace, members: &[u32]) -> bool {
    let set: BTreeSet<u32> = members.iter().copied().collect();
    set.contains(&space.identity())
        && members.iter().all(|&u| {
            set.contains(&space.inverse(u).expect("unimodular"))
                && members.iter().all(|&v| set.contains(&space.mul(u, v)))
        })
}

/// Result of running the formula guard and its semantic mirror side by side.
#[derive(Debug, Clone, Serialize)]
pub struct DualGuardReport {
    pub checked: u64,
    pub disagreements: u64,
    pub first_disagreement: Option<DualDisagreement>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DualDisagreement {
    pub alpha: Vec<u64>,
    pub formula_verdict: bool,
    pub semantic_verdict: bool,
}

/// Evaluates the guard formula `phi & chi & eta` with the reference
/// evaluator under every visited alpha assignment and compares it with the
/// semantic mirror. Any disagreement is a bug in one of the two paths.
pub fn dual_guard_sweep(
    ring: ResidueRing,
    n: usize,
    r: usize,
    mode: SweepMode,
) -> Result<DualGuardReport, DefinableError> {
    let basis = MonomialBasis::build_low_degree(n, r)?;
    let space = PointSpace::build(ring, &basis)?;
    let guard = build_guard(&basis);
    let z_syms: Vec<Sym> = parameter_syms(basis.c());
    debug_assert_eq!(
        guard.free_vars(),
        z_syms.iter().copied().collect::<BTreeSet<_>>()
    );

    let alpha_space = AlphaSpace::build(&ring, basis.c(), mode)?;
    let total = alpha_space.total;
    let chunk = 1u64 << 14;
    let chunk_count = total.div_ceil(chunk).max(1);

    struct Acc {
        checked: u64,
        disagreements: u64,
        first: Option<(u64, bool, bool)>,
    }

    let acc = (0..chunk_count)
        .into_par_iter()
        .fold(
            || {
                (
                    Acc {
                        checked: 0,
                        disagreements: 0,
                        first: None,
                    },
                    Scratch::new(&space),
                    NaiveEvaluator::new(&guard, &ring),
                    z_syms.iter().map(|&s| (s, 0u64)).collect::<Vec<_>>(),
                )
            },
            |(mut acc, mut scratch, mut evaluator, mut bindings), k| {
                let lo = k * chunk;
                let hi = (lo + chunk).min(total);
                for idx in lo..hi {
                    alpha_space.digits(idx, &mut scratch.digits);
                    for (slot, b) in bindings.iter_mut().enumerate() {
                        b.1 = scratch.digits[slot];
                    }
                    let formula_verdict = evaluator.eval_with_slots(&bindings);
                    let members = analyze_members(&space, &mut scratch);
                    let semantic_verdict = guard_semantic(&space, &scratch, &members);
                    acc.checked += 1;
                    if formula_verdict != semantic_verdict {
                        acc.disagreements += 1;
                        if acc.first.map(|(a, _, _)| idx < a).unwrap_or(true) {
                            acc.first = Some((idx, formula_verdict, semantic_verdict));
                        }
                    }
                }
                (acc, scratch, evaluator, bindings)
            },
        )
        .map(|(acc, _, _, _)| acc)
        .reduce(
            || Acc {
                checked: 0,
                disagreements: 0,
                first: None,
            },
            |mut a, b| {
                a.checked += b.checked;
                a.disagreements += b.disagreements;
                a.first = match (a.first, b.first) {
                    (Some(x), Some(y)) => Some(if x.0 <= y.0 { x } else { y }),
                    (x, y) => x.or(y),
                };
                a
            },
        );

    let first_disagreement = acc.first.map(|(idx, formula_verdict, semantic_verdict)| {
        let mut digits = vec![0; basis.c() * basis.c()];
        alpha_space.digits(idx, &mut digits);
        DualDisagreement {
            alpha: digits,
            formula_verdict,
            semantic_verdict,
        }
    });

    Ok(DualGuardReport {
        checked: acc.checked,
        disagreements: acc.disagreements,
        first_disagreement,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folang::eval::eval_naive;
    use crate::folang::Assignment;
    use crate::definable::formulas::build_psi;
    use crate::definable::realize_subgroup;
    use crate::definable::ParameterTuple;

    fn ring(m: u64) -> ResidueRing {
        ResidueRing::new(m).unwrap()
    }

    #[test]
    fn dagger_exhaustive_tiny_dimension() {
        // n = 1: SL_1 is trivial, every sweep must pass.
        for m in [2u64, 3] {
            for (s, t) in [(1, 1), (2, -1), (0, 3)] {
                let params = PsiParams::new(1, s, t, 1).unwrap();
                let report = dagger_check(ring(m), &params, SweepMode::Exhaustive).unwrap();
                assert!(report.pass, "m={m} s={s} t={t}");
                assert_eq!(report.alphas_visited, m.pow(4));
                assert_eq!(report.guard_group_mismatches, 0);
                let eval = eval_psi_semantic(ring(m), &params, SweepMode::Exhaustive).unwrap();
                assert!(eval.truth);
            }
        }
    }

    #[test]
    fn naive_psi_agrees_with_semantic_and_dagger_for_n1() {
        // Small enough for the reference evaluator to model-check the whole
        // sentence, which pins down the auxiliary-variable encoding.
        for m in [2u64, 3] {
            for (s, t) in [(1, 1), (2, 1), (-1, 1), (3, -2), (0, 2)] {
                let params = PsiParams::new(1, s, t, 1).unwrap();
                let basis = MonomialBasis::build(1, 1).unwrap();
                let psi = build_psi(&params, &basis);
                let naive = eval_naive(&psi, &ring(m), &Assignment::new()).unwrap();
                let semantic = eval_psi_semantic(ring(m), &params, SweepMode::Exhaustive)
                    .unwrap()
                    .truth;
                let dagger = dagger_check(ring(m), &params, SweepMode::Exhaustive)
                    .unwrap()
                    .pass;
                assert_eq!(naive, semantic, "m={m} s={s} t={t}");
                assert_eq!(naive, dagger, "m={m} s={s} t={t}");
                assert!(naive, "the sentence holds over every finite ring");
            }
        }
    }

    #[test]
    fn guard_scope_variants_agree_for_n1() {
        use crate::definable::formulas::build_psi_guard_scoped;
        for m in [2u64, 3] {
            for (s, t) in [(2, 1), (-1, 1)] {
                let params = PsiParams::new(1, s, t, 1).unwrap();
                let basis = MonomialBasis::build(1, 1).unwrap();
                let standard = build_psi(&params, &basis);
                let variant = build_psi_guard_scoped(&params, &basis);
                assert_eq!(
                    eval_naive(&standard, &ring(m), &Assignment::new()).unwrap(),
                    eval_naive(&variant, &ring(m), &Assignment::new()).unwrap(),
                    "m={m} s={s} t={t}"
                );
            }
        }
    }

    #[test]
    fn dual_guard_sweep_exhaustive_n1() {
        let report = dual_guard_sweep(ring(3), 1, 1, SweepMode::Exhaustive).unwrap();
        assert_eq!(report.checked, 81);
        assert_eq!(report.disagreements, 0, "{:?}", report.first_disagreement);
    }

    #[test]
    fn dual_guard_sweep_sampled_n2() {
        for m in [2u64, 3] {
            let report = dual_guard_sweep(
                ring(m),
                2,
                2,
                SweepMode::Sampled {
                    seed: 7,
                    count: 1000,
                },
            )
            .unwrap();
            assert_eq!(report.checked, 1000);
            assert_eq!(report.disagreements, 0, "m={m} {:?}", report.first_disagreement);
        }
    }

    #[test]
    fn membership_shorthand_is_sound() {
        // The membership formula holds under (Z -> alpha, U -> beta) exactly
        // when beta is a realized member.
        use crate::definable::formulas::membership_formula;
        for m in [2u64, 3] {
            let basis = MonomialBasis::build(2, 2).unwrap();
            let space = PointSpace::build(ring(m), &basis).unwrap();
            let mem = membership_formula(&basis, "U");
            let z_syms = parameter_syms(basis.c());
            let u_syms: Vec<Sym> = (1..=2)
                .flat_map(|i| (1..=2).map(move |j| Sym::intern(&format!("U_{i}_{j}"))))
                .collect();
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            for _ in 0..15 {
                let entries: Vec<u64> = (0..basis.c() * basis.c())
                    .map(|_| rng.gen_range(0..m))
                    .collect();
                let alpha =
                    ParameterTuple::new(ring(m), Arc::clone(&basis), entries.clone()).unwrap();
                let cand = realize_subgroup(&space, &alpha);
                let members: BTreeSet<u32> = cand.members().iter().copied().collect();
                for p in 0..space.len() as u32 {
                    let mut env = Assignment::new();
                    for (sym, &v) in z_syms.iter().zip(entries.iter()) {
                        env.set(*sym, ring(m).element(v));
                    }
                    for (sym, &v) in u_syms.iter().zip(space.point_entries(p).iter()) {
                        env.set(*sym, ring(m).element(v));
                    }
                    assert_eq!(
                        eval_naive(&mem, &ring(m), &env).unwrap(),
                        members.contains(&p),
                        "m={m} point={p}"
                    );
                }
            }
        }
    }

    #[test]
    fn guard_formula_tracks_realize_subgroup_on_samples() {
        // The formula-level guard agrees with the vanishing-level closure
        // diagnostics of the realized candidate.
        let m = 3u64;
        let basis = MonomialBasis::build(2, 2).unwrap();
        let space = PointSpace::build(ring(m), &basis).unwrap();
        let guard = build_guard(&basis);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let entries: Vec<u64> = (0..basis.c() * basis.c())
                .map(|_| rng.gen_range(0..m))
                .collect();
            let alpha = ParameterTuple::new(ring(m), Arc::clone(&basis), entries.clone()).unwrap();
            let cand = realize_subgroup(&space, &alpha);
            let mut env = Assignment::new();
            for (sym, &v) in parameter_syms(basis.c()).iter().zip(entries.iter()) {
                env.set(*sym, ring(m).element(v));
            }
            let formula_verdict = eval_naive(&guard, &ring(m), &env).unwrap();
            assert_eq!(formula_verdict, cand.guard_ok());
            if formula_verdict {
                assert!(cand.members_form_group());
            }
        }
    }

    #[test]
    fn exhaustive_cap_enforced() {
        let params = PsiParams::new(2, 1, 1, 2).unwrap(); // c = 15, 3^225 alphas
        assert!(matches!(
            dagger_check(ring(3), &params, SweepMode::Exhaustive),
            Err(DefinableError::ExhaustiveCapExceeded { .. })
        ));
    }

    #[test]
    fn sampled_dagger_f3_r2() {
        let params = PsiParams::new(2, 2, 1, 2).unwrap();
        let report = dagger_check(
            ring(3),
            &params,
            SweepMode::Sampled {
                seed: 42,
                count: 2000,
            },
        )
        .unwrap();
        assert!(report.pass);
        assert_eq!(report.alphas_visited, 2000);
        assert_eq!(report.guard_group_mismatches, 0);
    }

    #[test]
    fn sampled_sweeps_are_seed_reproducible() {
        let params = PsiParams::new(2, 3, 1, 2).unwrap();
        let mode = SweepMode::Sampled { seed: 9, count: 500 };
        let a = dagger_check(ring(3), &params, mode).unwrap();
        let b = dagger_check(ring(3), &params, mode).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }
}
