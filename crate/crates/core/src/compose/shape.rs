use crate::error::{Error, Result};
use crate::ir::hash::tags;
use crate::ir::{BitStr, Instr, Program, ProgramBuilder, Reg};

use super::CLASS_ID;

/// How one half of the input is checked.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HalfCheck {
    /// `PROJECT; CONST c; EQ`.
    Plain { c: BitStr },
    /// `PROJECT; CONST r; CONCAT; HASH; CONST y; EQ` with `y = H(r || c)` at width `n`.
    Hashed { salt: BitStr, target: BitStr },
}

impl HalfCheck {
    pub fn is_hashed(&self) -> bool {
        matches!(self, HalfCheck::Hashed { .. })
    }
}

/// The canonical split-conjunction program: left check AND right check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitShape {
    pub n: usize,
    pub halves: [HalfCheck; 2],
}

fn half_mask(n: usize, which: usize) -> BitStr {
    let h = n / 2;
    BitStr::from_bits((0..n).map(|i| (i < h) == (which == 0))).expect("n >= 2")
}

impl SplitShape {
    pub fn build(&self) -> Program {
        let n = self.n;
        let mut b = ProgramBuilder::new(n, CLASS_ID);
        let mut checks = [Reg::INPUT; 2];
        for (which, half) in self.halves.iter().enumerate() {
            let proj = b.project(b.input(), half_mask(n, which));
            checks[which] = match half {
                HalfCheck::Plain { c } => {
                    let k = b.konst(c.clone());
                    b.eq(proj, k)
                }
                HalfCheck::Hashed { salt, target } => {
                    let r = b.konst(salt.clone());
                    let salted = b.concat(r, proj);
                    let h = b.hash(tags::CHECK, salted, n);
                    let t = b.konst(target.clone());
                    b.eq(h, t)
                }
            };
        }
        let both = b.and(checks[0], checks[1]);
        b.output(both)
    }

    /// Recovers the shape of a program, requiring that rebuilding it gives back exactly
    /// the same program. This is the class-membership test.
    pub fn parse(p: &Program) -> Result<Self> {
        let mismatch = || Error::TemplateMismatch("not a split-conjunction program".into());
        let n = p.input_width;
        if n < 4 || !n.is_multiple_of(2) {
            return Err(mismatch());
        }
        let const_at = |i: usize| match p.instrs.get(i) {
            Some(Instr::Const { idx, .. }) => p.consts.get(usize::from(*idx)).cloned(),
            _ => None,
        };
        let mut at = 0;
        let mut halves = Vec::with_capacity(2);
        for _ in 0..2 {
            if !matches!(p.instrs.get(at), Some(Instr::Project { .. })) {
                return Err(mismatch());
            }
            let first = const_at(at + 1).ok_or_else(mismatch)?;
            match p.instrs.get(at + 2) {
                Some(Instr::Eq { .. }) => {
                    halves.push(HalfCheck::Plain { c: first });
                    at += 3;
                }
                Some(Instr::Concat { .. }) => {
                    let target = const_at(at + 4).ok_or_else(mismatch)?;
                    halves.push(HalfCheck::Hashed {
                        salt: first,
                        target,
                    });
                    at += 6;
                }
                _ => return Err(mismatch()),
            }
        }
        let right = halves.pop().expect("two halves");
        let left = halves.pop().expect("two halves");
        let shape = SplitShape {
            n,
            halves: [left, right],
        };
        if shape.build() != *p {
            return Err(mismatch());
        }
        Ok(shape)
    }
}
