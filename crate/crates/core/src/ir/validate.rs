use thiserror::Error;

use super::bits::BitStr;
use super::hash::MAX_HASH_WIDTH;
use super::program::{Instr, Program, Reg};

/// Largest width representable in the wire format.
pub const MAX_WIDTH: usize = u16::MAX as usize;

/// The first violated program invariant. `at` is an instruction index.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedProgram {
    #[error("program has no instructions")]
    Empty,
    #[error("input/output width {0} outside 1..=65535")]
    BadIoWidth(usize),
    #[error("constant {idx} has width {width} outside 1..=65535")]
    BadConstWidth { idx: usize, width: usize },
    #[error("instruction {at}: use-before-def of r{reg}")]
    UseBeforeDef { at: usize, reg: u16 },
    #[error("instruction {at}: r{reg} written twice")]
    Redefined { at: usize, reg: u16 },
    #[error("instruction {at}: constant index {idx} out of range")]
    BadConstIndex { at: usize, idx: u16 },
    #[error("instruction {at}: operand widths {left} and {right} differ")]
    WidthMismatch {
        at: usize,
        left: usize,
        right: usize,
    },
    #[error("instruction {at}: width {width} not allowed here")]
    BadWidth { at: usize, width: usize },
    #[error("instruction {at}: malformed DFA table")]
    BadTable { at: usize },
    #[error("instruction {at}: second OUTPUT on the execution path")]
    MultipleOutput { at: usize },
    #[error("instruction {at}: code after OUTPUT")]
    AfterOutput { at: usize },
    #[error("no OUTPUT instruction")]
    MissingOutput,
    #[error("OUTPUT width {got} differs from declared {declared}")]
    OutputWidth { declared: usize, got: usize },
}

/// Result of a successful validation: per-register widths and the static step cost.
#[derive(Debug, Clone)]
pub struct Layout {
    pub widths: Vec<Option<usize>>,
    pub steps: u64,
}

pub fn validate(p: &Program) -> Result<(), MalformedProgram> {
    check(p).map(|_| ())
}

pub(crate) fn check(p: &Program) -> Result<Layout, MalformedProgram> {
    use MalformedProgram::*;

    for w in [p.input_width, p.output_width] {
        if w == 0 || w > MAX_WIDTH {
            return Err(BadIoWidth(w));
        }
    }
    for (idx, c) in p.consts.iter().enumerate() {
        if c.width() > MAX_WIDTH {
            return Err(BadConstWidth {
                idx,
                width: c.width(),
            });
        }
    }
    if p.instrs.is_empty() {
        return Err(Empty);
    }

    let max_reg = p
        .instrs
        .iter()
        .flat_map(|i| i.dst().into_iter().chain(i.reads()))
        .map(Reg::index)
        .max()
        .unwrap_or(0);
    let mut widths: Vec<Option<usize>> = vec![None; max_reg + 1];
    widths[0] = Some(p.input_width);
    let mut steps: u64 = 0;
    let mut output_seen = false;

    for (at, ins) in p.instrs.iter().enumerate() {
        if output_seen {
            return Err(if matches!(ins, Instr::Output { .. }) {
                MultipleOutput { at }
            } else {
                AfterOutput { at }
            });
        }
        let w = |r: Reg| widths[r.index()].ok_or(UseBeforeDef { at, reg: r.0 });
        let same = |a: usize, b: usize| {
            if a == b {
                Ok(a)
            } else {
                Err(WidthMismatch {
                    at,
                    left: a,
                    right: b,
                })
            }
        };
        let bounded = |width: usize| {
            if (1..=MAX_WIDTH).contains(&width) {
                Ok(width)
            } else {
                Err(BadWidth { at, width })
            }
        };
        steps += 1;
        let out_width = match ins {
            Instr::Const { idx, .. } => p
                .consts
                .get(usize::from(*idx))
                .map(BitStr::width)
                .ok_or(BadConstIndex { at, idx: *idx })?,
            Instr::Eq { a, b, .. } | Instr::Lt { a, b, .. } => {
                same(w(*a)?, w(*b)?)?;
                1
            }
            Instr::Xor { a, b, .. } | Instr::And { a, b, .. } | Instr::Or { a, b, .. } => {
                same(w(*a)?, w(*b)?)?
            }
            Instr::Not { a, .. } => w(*a)?,
            Instr::Project { src, mask, .. } => {
                same(w(*src)?, mask.width())?;
                let ones = mask.count_ones();
                if ones == 0 {
                    return Err(BadWidth { at, width: 0 });
                }
                ones
            }
            Instr::Concat { a, b, .. } => bounded(w(*a)? + w(*b)?)?,
            Instr::Trunc { src, width, .. } => {
                let width = usize::from(*width);
                if width == 0 || width > w(*src)? {
                    return Err(BadWidth { at, width });
                }
                width
            }
            Instr::Hash { src, width, .. } => {
                w(*src)?;
                let width = usize::from(*width);
                if width == 0 || width > MAX_HASH_WIDTH {
                    return Err(BadWidth { at, width });
                }
                width
            }
            Instr::Ite {
                cond, then, other, ..
            } => {
                let cw = w(*cond)?;
                if cw != 1 {
                    return Err(BadWidth { at, width: cw });
                }
                same(w(*then)?, w(*other)?)?
            }
            Instr::DfaRun { src, table, .. } => {
                if !table.is_well_formed() {
                    return Err(BadTable { at });
                }
                steps += w(*src)? as u64;
                1
            }
            Instr::Output { src } => {
                let got = w(*src)?;
                if got != p.output_width {
                    return Err(OutputWidth {
                        declared: p.output_width,
                        got,
                    });
                }
                output_seen = true;
                continue;
            }
        };
        let dst = ins.dst().expect("non-output instructions write a register");
        if dst == Reg::INPUT || widths[dst.index()].is_some() {
            return Err(Redefined { at, reg: dst.0 });
        }
        widths[dst.index()] = Some(out_width);
    }

    if !output_seen {
        return Err(MissingOutput);
    }
    Ok(Layout { widths, steps })
}
