use serde::{Deserialize, Serialize};

use super::bits::BitStr;
use super::hash::MAX_HASH_WIDTH;

/// Register index. Register 0 holds the program input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Reg(pub u16);

impl Reg {
    pub const INPUT: Reg = Reg(0);

    pub fn index(self) -> usize {
        usize::from(self.0)
    }
}

/// Transition tables embedded in a DFARUN instruction. States are 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DfaTable {
    pub start: u16,
    pub accept: u16,
    pub m0: Vec<u16>,
    pub m1: Vec<u16>,
}

impl DfaTable {
    pub fn n_states(&self) -> usize {
        self.m0.len()
    }

    pub fn is_well_formed(&self) -> bool {
        let n = self.m0.len();
        n >= 1
            && n <= usize::from(u16::MAX)
            && self.m1.len() == n
            && usize::from(self.start) < n
            && usize::from(self.accept) < n
            && self.m0.iter().chain(&self.m1).all(|&s| usize::from(s) < n)
    }

    /// Runs the machine over `word`, one step per symbol.
    pub fn accepts<I: IntoIterator<Item = bool>>(&self, word: I) -> bool {
        let mut s = self.start;
        for b in word {
            s = if b {
                self.m1[usize::from(s)]
            } else {
                self.m0[usize::from(s)]
            };
        }
        s == self.accept
    }

    /// Bits this table occupies in the wire format: state count, start, accept and both rows.
    pub fn payload_bits(&self) -> usize {
        16 * (3 + 2 * self.n_states())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Instr {
    Const {
        dst: Reg,
        idx: u16,
    },
    Eq {
        dst: Reg,
        a: Reg,
        b: Reg,
    },
    Xor {
        dst: Reg,
        a: Reg,
        b: Reg,
    },
    And {
        dst: Reg,
        a: Reg,
        b: Reg,
    },
    Or {
        dst: Reg,
        a: Reg,
        b: Reg,
    },
    Not {
        dst: Reg,
        a: Reg,
    },
    /// Unsigned big-endian `a < b`.
    Lt {
        dst: Reg,
        a: Reg,
        b: Reg,
    },
    Project {
        dst: Reg,
        src: Reg,
        mask: BitStr,
    },
    Concat {
        dst: Reg,
        a: Reg,
        b: Reg,
    },
    /// Keeps the leading `width` bits.
    Trunc {
        dst: Reg,
        src: Reg,
        width: u16,
    },
    Hash {
        dst: Reg,
        tag: u8,
        src: Reg,
        width: u16,
    },
    Ite {
        dst: Reg,
        cond: Reg,
        then: Reg,
        other: Reg,
    },
    /// One transition per bit of `src`; yields a single accept bit.
    DfaRun {
        dst: Reg,
        src: Reg,
        table: DfaTable,
    },
    Output {
        src: Reg,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Opcode {
    Const = 0x01,
    Eq = 0x02,
    Xor = 0x03,
    And = 0x04,
    Or = 0x05,
    Not = 0x06,
    Lt = 0x07,
    Project = 0x08,
    Concat = 0x09,
    Trunc = 0x0a,
    Hash = 0x0b,
    Ite = 0x0c,
    DfaRun = 0x0d,
    Output = 0x0e,
}

impl Opcode {
    pub const ALL: [Opcode; 14] = [
        Opcode::Const,
        Opcode::Eq,
        Opcode::Xor,
        Opcode::And,
        Opcode::Or,
        Opcode::Not,
        Opcode::Lt,
        Opcode::Project,
        Opcode::Concat,
        Opcode::Trunc,
        Opcode::Hash,
        Opcode::Ite,
        Opcode::DfaRun,
        Opcode::Output,
    ];

    pub fn from_byte(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|op| *op as u8 == b)
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Const => "CONST",
            Opcode::Eq => "EQ",
            Opcode::Xor => "XOR",
            Opcode::And => "AND",
            Opcode::Or => "OR",
            Opcode::Not => "NOT",
            Opcode::Lt => "LT",
            Opcode::Project => "PROJECT",
            Opcode::Concat => "CONCAT",
            Opcode::Trunc => "TRUNC",
            Opcode::Hash => "HASH",
            Opcode::Ite => "ITE",
            Opcode::DfaRun => "DFARUN",
            Opcode::Output => "OUTPUT",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|op| op.mnemonic() == s)
    }
}

impl Instr {
    pub fn opcode(&self) -> Opcode {
        match self {
            Instr::Const { .. } => Opcode::Const,
            Instr::Eq { .. } => Opcode::Eq,
            Instr::Xor { .. } => Opcode::Xor,
            Instr::And { .. } => Opcode::And,
            Instr::Or { .. } => Opcode::Or,
            Instr::Not { .. } => Opcode::Not,
            Instr::Lt { .. } => Opcode::Lt,
            Instr::Project { .. } => Opcode::Project,
            Instr::Concat { .. } => Opcode::Concat,
            Instr::Trunc { .. } => Opcode::Trunc,
            Instr::Hash { .. } => Opcode::Hash,
            Instr::Ite { .. } => Opcode::Ite,
            Instr::DfaRun { .. } => Opcode::DfaRun,
            Instr::Output { .. } => Opcode::Output,
        }
    }

    pub fn dst(&self) -> Option<Reg> {
        match *self {
            Instr::Const { dst, .. }
            | Instr::Eq { dst, .. }
            | Instr::Xor { dst, .. }
            | Instr::And { dst, .. }
            | Instr::Or { dst, .. }
            | Instr::Not { dst, .. }
            | Instr::Lt { dst, .. }
            | Instr::Project { dst, .. }
            | Instr::Concat { dst, .. }
            | Instr::Trunc { dst, .. }
            | Instr::Hash { dst, .. }
            | Instr::Ite { dst, .. }
            | Instr::DfaRun { dst, .. } => Some(dst),
            Instr::Output { .. } => None,
        }
    }

    pub fn reads(&self) -> Vec<Reg> {
        match *self {
            Instr::Const { .. } => vec![],
            Instr::Eq { a, b, .. }
            | Instr::Xor { a, b, .. }
            | Instr::And { a, b, .. }
            | Instr::Or { a, b, .. }
            | Instr::Lt { a, b, .. }
            | Instr::Concat { a, b, .. } => vec![a, b],
            Instr::Not { a, .. } => vec![a],
            Instr::Project { src, .. }
            | Instr::Trunc { src, .. }
            | Instr::Hash { src, .. }
            | Instr::DfaRun { src, .. }
            | Instr::Output { src } => vec![src],
            Instr::Ite {
                cond, then, other, ..
            } => vec![cond, then, other],
        }
    }
}

/// A loop-free predicate program over fixed-width bit strings.
///
/// Control flow is straight-line; conditionals are expressed with `ITE` selects, so
/// there is exactly one execution path and it ends in the single `OUTPUT`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Program {
    pub input_width: usize,
    pub output_width: usize,
    pub consts: Vec<BitStr>,
    pub instrs: Vec<Instr>,
    pub class_tag: String,
}

impl Program {
    /// Canonical size: instruction count plus constant-pool bits plus immediate payload
    /// bits (projection masks and DFA tables).
    pub fn size(&self) -> usize {
        let const_bits: usize = self.consts.iter().map(BitStr::width).sum();
        let imm_bits: usize = self
            .instrs
            .iter()
            .map(|i| match i {
                Instr::Project { mask, .. } => mask.width(),
                Instr::DfaRun { table, .. } => table.payload_bits(),
                _ => 0,
            })
            .sum();
        self.instrs.len() + const_bits + imm_bits
    }

    /// The same program read at a different input width. Only meaningful for programs
    /// whose input feeds width-agnostic instructions (DFARUN); validation decides.
    pub fn with_input_width(&self, width: usize) -> Self {
        Self {
            input_width: width,
            ..self.clone()
        }
    }

    /// Index of the instruction defining `reg`.
    pub fn definition(&self, reg: Reg) -> Option<&Instr> {
        self.instrs.iter().find(|i| i.dst() == Some(reg))
    }

    /// The constant loaded into `reg`, if `reg` is defined by `CONST`.
    pub fn const_of(&self, reg: Reg) -> Option<&BitStr> {
        match self.definition(reg)? {
            Instr::Const { idx, .. } => self.consts.get(usize::from(*idx)),
            _ => None,
        }
    }

    pub fn output_reg(&self) -> Option<Reg> {
        match self.instrs.last()? {
            Instr::Output { src } => Some(*src),
            _ => None,
        }
    }
}

/// Incremental construction with width tracking. Widths are checked again by
/// [`super::validate`]; the builder only needs them to infer the output width.
#[derive(Debug, Clone)]
pub struct ProgramBuilder {
    input_width: usize,
    consts: Vec<BitStr>,
    instrs: Vec<Instr>,
    widths: Vec<usize>,
    class_tag: String,
}

impl ProgramBuilder {
    pub fn new(input_width: usize, class_tag: impl Into<String>) -> Self {
        Self {
            input_width,
            consts: Vec::new(),
            instrs: Vec::new(),
            widths: vec![input_width],
            class_tag: class_tag.into(),
        }
    }

    pub fn input(&self) -> Reg {
        Reg::INPUT
    }

    pub fn width(&self, r: Reg) -> usize {
        self.widths[r.index()]
    }

    fn push(&mut self, width: usize, make: impl FnOnce(Reg) -> Instr) -> Reg {
        let dst = Reg(u16::try_from(self.widths.len()).expect("register file exhausted"));
        self.widths.push(width);
        self.instrs.push(make(dst));
        dst
    }

    pub fn konst(&mut self, value: BitStr) -> Reg {
        let idx = u16::try_from(self.consts.len()).expect("constant pool exhausted");
        let w = value.width();
        self.consts.push(value);
        self.push(w, |dst| Instr::Const { dst, idx })
    }

    pub fn eq(&mut self, a: Reg, b: Reg) -> Reg {
        self.push(1, |dst| Instr::Eq { dst, a, b })
    }

    pub fn lt(&mut self, a: Reg, b: Reg) -> Reg {
        self.push(1, |dst| Instr::Lt { dst, a, b })
    }

    pub fn xor(&mut self, a: Reg, b: Reg) -> Reg {
        let w = self.width(a);
        self.push(w, |dst| Instr::Xor { dst, a, b })
    }

    pub fn and(&mut self, a: Reg, b: Reg) -> Reg {
        let w = self.width(a);
        self.push(w, |dst| Instr::And { dst, a, b })
    }

    pub fn or(&mut self, a: Reg, b: Reg) -> Reg {
        let w = self.width(a);
        self.push(w, |dst| Instr::Or { dst, a, b })
    }

    pub fn not(&mut self, a: Reg) -> Reg {
        let w = self.width(a);
        self.push(w, |dst| Instr::Not { dst, a })
    }

    pub fn project(&mut self, src: Reg, mask: BitStr) -> Reg {
        let w = mask.count_ones();
        self.push(w, |dst| Instr::Project { dst, src, mask })
    }

    pub fn concat(&mut self, a: Reg, b: Reg) -> Reg {
        let w = self.width(a) + self.width(b);
        self.push(w, |dst| Instr::Concat { dst, a, b })
    }

    pub fn trunc(&mut self, src: Reg, width: usize) -> Reg {
        let w16 = u16::try_from(width).expect("width fits u16");
        self.push(width, |dst| Instr::Trunc {
            dst,
            src,
            width: w16,
        })
    }

    pub fn hash(&mut self, tag: u8, src: Reg, width: usize) -> Reg {
        assert!(width <= MAX_HASH_WIDTH);
        let w16 = width as u16;
        self.push(width, |dst| Instr::Hash {
            dst,
            tag,
            src,
            width: w16,
        })
    }

    pub fn ite(&mut self, cond: Reg, then: Reg, other: Reg) -> Reg {
        let w = self.width(then);
        self.push(w, |dst| Instr::Ite {
            dst,
            cond,
            then,
            other,
        })
    }

    pub fn dfa_run(&mut self, src: Reg, table: DfaTable) -> Reg {
        self.push(1, |dst| Instr::DfaRun { dst, src, table })
    }

    pub fn output(mut self, src: Reg) -> Program {
        let output_width = self.width(src);
        self.instrs.push(Instr::Output { src });
        Program {
            input_width: self.input_width,
            output_width,
            consts: self.consts,
            instrs: self.instrs,
            class_tag: self.class_tag,
        }
    }
}
