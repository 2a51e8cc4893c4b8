//! Compiled evaluator: flattens a formula into a branch/loop instruction
//! sequence over a register file of ring values, with quantifiers as counted
//! loops that exit early. Contract: identical truth value to the reference
//! evaluator under every covering assignment.

use super::eval::EvalError;
use super::{Assignment, Formula, Sym, Term};
use crate::ring::ResidueRing;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Instr {
    /// `vals[dst] = val`
    Const { dst: u32, val: u64 },
    /// `vals[dst] = (vals[a] + vals[b]) mod m`
    Add { dst: u32, a: u32, b: u32 },
    /// `vals[dst] = (vals[a] * vals[b]) mod m`
    Mul { dst: u32, a: u32, b: u32 },
    /// `bools[dst] = vals[a] == vals[b]`
    Eq { dst: u32, a: u32, b: u32 },
    SetB { dst: u32, val: bool },
    NotB { dst: u32 },
    Jump { to: u32 },
    BranchFalse { cond: u32, to: u32 },
    BranchTrue { cond: u32, to: u32 },
    /// `vals[var] = 0`
    LoopInit { var: u32 },
    /// `vals[var] += 1; if vals[var] < m jump body`
    LoopNext { var: u32, body: u32 },
}

/// The compiled form of one formula over one ring. Immutable and shareable;
/// evaluation owns its scratch registers, so one compiled formula can be
/// evaluated from many threads at once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledFormula {
    modulus: u64,
    code: Vec<Instr>,
    val_regs: usize,
    bool_regs: usize,
    free_regs: Vec<(Sym, u32)>,
}

#[derive(Clone, Copy)]
enum Operand {
    Reg(u32),
    Const(u64),
}

struct Codegen {
    modulus: u64,
    code: Vec<Instr>,
    scope: Vec<(Sym, u32)>,
    free_regs: Vec<(Sym, u32)>,
    next_val: u32,
    next_bool: u32,
}

impl Codegen {
    fn alloc_val(&mut self) -> u32 {
        let r = self.next_val;
        self.next_val += 1;
        r
    }

    fn var_reg(&mut self, x: Sym) -> u32 {
        if let Some(&(_, r)) = self.scope.iter().rev().find(|&&(s, _)| s == x) {
            return r;
        }
        if let Some(&(_, r)) = self.free_regs.iter().find(|&&(s, _)| s == x) {
            return r;
        }
        let r = self.alloc_val();
        self.free_regs.push((x, r));
        r
    }

    fn here(&self) -> u32 {
        self.code.len() as u32
    }

    fn patch(&mut self, at: u32, to: u32) {
        match &mut self.code[at as usize] {
            Instr::Jump { to: t }
            | Instr::BranchFalse { to: t, .. }
            | Instr::BranchTrue { to: t, .. } => *t = to,
            other => panic!("patching a non-jump instruction {other:?}"),
        }
    }

    fn materialize(&mut self, op: Operand) -> u32 {
        match op {
            Operand::Reg(r) => r,
            Operand::Const(v) => {
                let dst = self.alloc_val();
                self.code.push(Instr::Const { dst, val: v });
                dst
            }
        }
    }

    fn gen_term(&mut self, t: &Term) -> Operand {
        match t {
            Term::Var(x) => Operand::Reg(self.var_reg(*x)),
            Term::Zero => Operand::Const(0),
            Term::One => Operand::Const(1 % self.modulus),
            Term::Add(a, b) => {
                let oa = self.gen_term(a);
                let ob = self.gen_term(b);
                if let (Operand::Const(ca), Operand::Const(cb)) = (oa, ob) {
                    return Operand::Const((ca + cb) % self.modulus);
                }
                let ra = self.materialize(oa);
                let rb = self.materialize(ob);
                let dst = self.alloc_val();
                self.code.push(Instr::Add { dst, a: ra, b: rb });
                Operand::Reg(dst)
            }
            Term::Mul(a, b) => {
                let oa = self.gen_term(a);
                let ob = self.gen_term(b);
                if let (Operand::Const(ca), Operand::Const(cb)) = (oa, ob) {
                    return Operand::Const(ca * cb % self.modulus);
                }
                let ra = self.materialize(oa);
                let rb = self.materialize(ob);
                let dst = self.alloc_val();
                self.code.push(Instr::Mul { dst, a: ra, b: rb });
                Operand::Reg(dst)
            }
        }
    }

    fn gen_formula(&mut self, f: &Formula, dst: u32) {
        match f {
            Formula::Eq(a, b) => {
                let oa = self.gen_term(a);
                let ob = self.gen_term(b);
                let ra = self.materialize(oa);
                let rb = self.materialize(ob);
                self.code.push(Instr::Eq { dst, a: ra, b: rb });
            }
            Formula::Not(g) => {
                self.gen_formula(g, dst);
                self.code.push(Instr::NotB { dst });
            }
            Formula::And(a, b) => {
                self.gen_formula(a, dst);
                let skip = self.here();
                self.code.push(Instr::BranchFalse { cond: dst, to: 0 });
                self.gen_formula(b, dst);
                let end = self.here();
                self.patch(skip, end);
            }
            Formula::Or(a, b) => {
                self.gen_formula(a, dst);
                let skip = self.here();
                self.code.push(Instr::BranchTrue { cond: dst, to: 0 });
                self.gen_formula(b, dst);
                let end = self.here();
                self.patch(skip, end);
            }
            Formula::Implies(a, b) => {
                self.gen_formula(a, dst);
                let to_vacuous = self.here();
                self.code.push(Instr::BranchFalse { cond: dst, to: 0 });
                self.gen_formula(b, dst);
                let to_end = self.here();
                self.code.push(Instr::Jump { to: 0 });
                let vacuous = self.here();
                self.code.push(Instr::SetB { dst, val: true });
                let end = self.here();
                self.patch(to_vacuous, vacuous);
                self.patch(to_end, end);
            }
            Formula::ForAll(x, g) | Formula::Exists(x, g) => {
                let is_forall = matches!(f, Formula::ForAll(..));
                let var = self.alloc_val();
                self.scope.push((*x, var));
                self.code.push(Instr::LoopInit { var });
                let body = self.here();
                self.gen_formula(g, dst);
                let exit_jump = self.here();
                if is_forall {
                    self.code.push(Instr::BranchFalse { cond: dst, to: 0 });
                } else {
                    self.code.push(Instr::BranchTrue { cond: dst, to: 0 });
                }
                self.code.push(Instr::LoopNext { var, body });
                self.code.push(Instr::SetB { dst, val: is_forall });
                let end = self.here();
                self.patch(exit_jump, end);
                self.scope.pop();
            }
        }
    }
}

/// Compiles one formula for evaluation over one ring. Free variables become
/// input registers in first-occurrence order; integer-literal chains are
/// folded into single ring constants.
pub fn compile(f: &Formula, ring: &ResidueRing) -> CompiledFormula {
    let mut cg = Codegen {
        modulus: ring.modulus(),
        code: Vec::new(),
        scope: Vec::new(),
        free_regs: Vec::new(),
        next_val: 0,
        next_bool: 1, // bool register 0 holds the result
    };
    cg.gen_formula(f, 0);
    CompiledFormula {
        modulus: cg.modulus,
        code: cg.code,
        val_regs: cg.next_val as usize,
        bool_regs: cg.next_bool as usize,
        free_regs: cg.free_regs,
    }
}

impl CompiledFormula {
    pub fn free_vars(&self) -> impl Iterator<Item = Sym> + '_ {
        self.free_regs.iter().map(|&(s, _)| s)
    }

    pub fn code_len(&self) -> usize {
        self.code.len()
    }

    pub fn eval(&self, env: &Assignment) -> Result<bool, EvalError> {
        Ok(self.run(env)?.0)
    }

    /// Evaluates and also reports the number of atom (equality) evaluations
    /// executed, for comparison against the reference evaluator's counter.
    pub fn eval_counting(&self, env: &Assignment) -> Result<(bool, u64), EvalError> {
        self.run(env)
    }

    fn run(&self, env: &Assignment) -> Result<(bool, u64), EvalError> {
        let mut vals = vec![0u64; self.val_regs];
        let mut bools = vec![false; self.bool_regs];
        for &(sym, reg) in &self.free_regs {
            match env.get(sym) {
                Some(v) => {
                    if v.ring().modulus() != self.modulus {
                        return Err(EvalError::WrongRing(self.modulus));
                    }
                    vals[reg as usize] = v.value();
                }
                None => return Err(EvalError::UnboundVariable(sym.name().to_owned())),
            }
        }
        let m = self.modulus;
        let mut steps = 0u64;
        let mut pc = 0usize;
        while pc < self.code.len() {
            match self.code[pc] {
                Instr::Const { dst, val } => vals[dst as usize] = val,
                Instr::Add { dst, a, b } => {
                    let s = vals[a as usize] + vals[b as usize];
                    vals[dst as usize] = if s >= m { s - m } else { s };
                }
                Instr::Mul { dst, a, b } => {
                    vals[dst as usize] = vals[a as usize] * vals[b as usize] % m;
                }
                Instr::Eq { dst, a, b } => {
                    steps += 1;
                    bools[dst as usize] = vals[a as usize] == vals[b as usize];
                }
                Instr::SetB { dst, val } => bools[dst as usize] = val,
                Instr::NotB { dst } => bools[dst as usize] = !bools[dst as usize],
                Instr::Jump { to } => {
                    pc = to as usize;
                    continue;
                }
                Instr::BranchFalse { cond, to } => {
                    if !bools[cond as usize] {
                        pc = to as usize;
                        continue;
                    }
                }
                Instr::BranchTrue { cond, to } => {
                    if bools[cond as usize] {
                        pc = to as usize;
                        continue;
                    }
                }
                Instr::LoopInit { var } => vals[var as usize] = 0,
                Instr::LoopNext { var, body } => {
                    vals[var as usize] += 1;
                    if vals[var as usize] < m {
                        pc = body as usize;
                        continue;
                    }
                }
            }
            pc += 1;
        }
        Ok((bools[0], steps))
    }
}
