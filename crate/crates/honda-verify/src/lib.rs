//! Exhaustive verification of commutator properties on finite matrix groups.
//!
//! A group has the *Honda property* when, for every commutator `gamma` and
//! every `delta` generating the same cyclic subgroup, `delta` is itself a
//! commutator. This crate makes that property, its strong variant and its
//! first-order and profinite shadows checkable by brute force at desk scale:
//!
//! - [`ring`] — exact arithmetic in residue rings `Z/m`;
//! - [`matgroup`] — enumerated subgroups of `SL_n(Z/m)` with commutator
//!   analysis, Honda / strong-Honda verifiers and witness certificates;
//! - [`folang`] — the first-order language of rings: parser, printer,
//!   reference evaluator and a compiled evaluator;
//! - [`definable`] — subgroups of `SL_n` cut out by parameterized degree-
//!   bounded polynomials, the sentence asserting the commutator-power
//!   criterion over all of them, and exhaustive/sampled parameter sweeps;
//! - [`tower`] — congruence towers `SL_n(Z/p^k)` with verified reduction
//!   maps and backtracking witness lifting;
//! - [`cli`] — the batch command-line surface with JSON reports.
//!
//! The `examples/` directory has one runnable walkthrough per capability;
//! `tests/acceptance.rs` is the verification campaign gating releases.

pub mod cli;
pub mod definable;
pub mod folang;
pub mod matgroup;
pub mod ring;
pub mod tower;
