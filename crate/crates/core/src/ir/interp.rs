//! Deterministic, budgeted interpreter.
//!
//! Every instruction costs one step; DFARUN additionally costs one step per consumed
//! symbol. Since programs are straight-line, the cost of a run is a static property of
//! the program and is known after validation.

use thiserror::Error;

use super::bits::BitStr;
use super::hash::hash_bits;
use super::program::{Instr, Program};
use super::validate::{check, MalformedProgram};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    #[error("malformed program: {0}")]
    Malformed(#[from] MalformedProgram),
    #[error("input width {got} does not match program input width {expected}")]
    WidthMismatch { expected: usize, got: usize },
    #[error("step budget {budget} exceeded (program needs {needed})")]
    BudgetExceeded { budget: u64, needed: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Execution {
    pub output: BitStr,
    pub steps: u64,
}

/// A program that passed validation, ready to run repeatedly.
#[derive(Debug, Clone)]
pub struct Checked<'p> {
    program: &'p Program,
    steps: u64,
    registers: usize,
}

impl<'p> Checked<'p> {
    pub fn new(program: &'p Program) -> Result<Self, MalformedProgram> {
        let layout = check(program)?;
        Ok(Self {
            program,
            steps: layout.steps,
            registers: layout.widths.len(),
        })
    }

    pub fn program(&self) -> &'p Program {
        self.program
    }

    /// Steps every run of this program takes.
    pub fn step_cost(&self) -> u64 {
        self.steps
    }

    pub fn run(&self, x: &BitStr) -> Result<Execution, ExecError> {
        self.run_budgeted(x, u64::MAX)
    }

    pub fn run_budgeted(&self, x: &BitStr, budget: u64) -> Result<Execution, ExecError> {
        let p = self.program;
        if x.width() != p.input_width {
            return Err(ExecError::WidthMismatch {
                expected: p.input_width,
                got: x.width(),
            });
        }
        if self.steps > budget {
            return Err(ExecError::BudgetExceeded {
                budget,
                needed: self.steps,
            });
        }

        let mut regs: Vec<Option<BitStr>> = vec![None; self.registers];
        regs[0] = Some(x.clone());
        let get = |regs: &[Option<BitStr>], r: super::Reg| -> BitStr {
            regs[r.index()]
                .clone()
                .expect("validated: defined before use")
        };
        let bit = |b: bool| BitStr::from_u64(u64::from(b), 1).expect("width 1");

        for ins in &p.instrs {
            let value = match ins {
                Instr::Const { idx, .. } => p.consts[usize::from(*idx)].clone(),
                Instr::Eq { a, b, .. } => bit(get(&regs, *a) == get(&regs, *b)),
                Instr::Lt { a, b, .. } => bit(get(&regs, *a) < get(&regs, *b)),
                Instr::Xor { a, b, .. } => get(&regs, *a).xor(&get(&regs, *b)),
                Instr::And { a, b, .. } => get(&regs, *a).and(&get(&regs, *b)),
                Instr::Or { a, b, .. } => get(&regs, *a).or(&get(&regs, *b)),
                Instr::Not { a, .. } => get(&regs, *a).not(),
                Instr::Project { src, mask, .. } => get(&regs, *src)
                    .project(mask)
                    .expect("validated: mask selects at least one bit"),
                Instr::Concat { a, b, .. } => get(&regs, *a).concat(&get(&regs, *b)),
                Instr::Trunc { src, width, .. } => get(&regs, *src)
                    .prefix(usize::from(*width))
                    .expect("validated: 1 <= width <= source width"),
                Instr::Hash {
                    tag, src, width, ..
                } => hash_bits(*tag, &get(&regs, *src), usize::from(*width)),
                Instr::Ite {
                    cond, then, other, ..
                } => {
                    if get(&regs, *cond).bit(0) {
                        get(&regs, *then)
                    } else {
                        get(&regs, *other)
                    }
                }
                Instr::DfaRun { src, table, .. } => bit(table.accepts(get(&regs, *src).bits())),
                Instr::Output { src } => {
                    return Ok(Execution {
                        output: get(&regs, *src),
                        steps: self.steps,
                    })
                }
            };
            let dst = ins.dst().expect("non-output instruction");
            regs[dst.index()] = Some(value);
        }
        unreachable!("validated programs end in OUTPUT")
    }
}

/// Validates `p` and runs it on `x`.
pub fn execute(p: &Program, x: &BitStr) -> Result<BitStr, ExecError> {
    Ok(Checked::new(p)?.run(x)?.output)
}

/// Acceptance convention shared by predicates and compute-and-compare programs: the
/// leading output bit is the accept flag.
pub fn accepts(output: &BitStr) -> bool {
    output.bit(0)
}
