//! Program wire formats.
//!
//! Binary layout (all integers big-endian):
//!
//! ```text
//! "OBF1"
//! u16 input_width, u16 output_width
//! u16 const_count, then per constant: u16 width, ceil(width/8) bytes
//! u16 instr_count, then per instruction: u8 opcode, operands
//! u16 tag_len, tag_len bytes of UTF-8 class tag
//! ```
//!
//! Operands per opcode (`r` = u16 register, `w` = u16 width):
//!
//! ```text
//! CONST   r dst, u16 const index
//! EQ XOR AND OR LT CONCAT   r dst, r a, r b
//! NOT     r dst, r a
//! PROJECT r dst, r src, w mask_width, mask bytes
//! TRUNC   r dst, r src, w width
//! HASH    r dst, u8 tag, r src, w width
//! ITE     r dst, r cond, r then, r else
//! DFARUN  r dst, r src, u16 states, u16 start, u16 accept, states*u16 m0, states*u16 m1
//! OUTPUT  r src
//! ```
//!
//! Bit strings carry zero padding in their leading byte; nonzero padding is a parse
//! error, which keeps the encoding canonical. The JSON mirror is for inspection.

use serde_json::{json, Value};
use thiserror::Error;

use super::bits::{byte_len, BitStr};
use super::program::{DfaTable, Instr, Opcode, Program, Reg};

pub const MAGIC: &[u8; 4] = b"OBF1";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at byte {offset}: {reason}")]
pub struct ParseError {
    pub offset: usize,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("{what} = {value} does not fit in 16 bits")]
    TooLarge { what: &'static str, value: usize },
}

struct Writer(Vec<u8>);

impl Writer {
    fn u8(&mut self, v: u8) {
        self.0.push(v);
    }

    fn u16(&mut self, what: &'static str, v: usize) -> Result<(), EncodeError> {
        let v = u16::try_from(v).map_err(|_| EncodeError::TooLarge { what, value: v })?;
        self.0.extend_from_slice(&v.to_be_bytes());
        Ok(())
    }

    fn reg(&mut self, r: Reg) {
        self.0.extend_from_slice(&r.0.to_be_bytes());
    }

    fn bits(&mut self, b: &BitStr) -> Result<(), EncodeError> {
        self.u16("width", b.width())?;
        self.0.extend_from_slice(b.as_bytes());
        Ok(())
    }
}

pub fn to_bytes(p: &Program) -> Result<Vec<u8>, EncodeError> {
    let mut w = Writer(MAGIC.to_vec());
    w.u16("input_width", p.input_width)?;
    w.u16("output_width", p.output_width)?;
    w.u16("const count", p.consts.len())?;
    for c in &p.consts {
        w.bits(c)?;
    }
    w.u16("instr count", p.instrs.len())?;
    for ins in &p.instrs {
        w.u8(ins.opcode() as u8);
        match ins {
            Instr::Const { dst, idx } => {
                w.reg(*dst);
                w.u16("const index", usize::from(*idx))?;
            }
            Instr::Eq { dst, a, b }
            | Instr::Xor { dst, a, b }
            | Instr::And { dst, a, b }
            | Instr::Or { dst, a, b }
            | Instr::Lt { dst, a, b }
            | Instr::Concat { dst, a, b } => {
                w.reg(*dst);
                w.reg(*a);
                w.reg(*b);
            }
            Instr::Not { dst, a } => {
                w.reg(*dst);
                w.reg(*a);
            }
            Instr::Project { dst, src, mask } => {
                w.reg(*dst);
                w.reg(*src);
                w.bits(mask)?;
            }
            Instr::Trunc { dst, src, width } => {
                w.reg(*dst);
                w.reg(*src);
                w.u16("width", usize::from(*width))?;
            }
            Instr::Hash {
                dst,
                tag,
                src,
                width,
            } => {
                w.reg(*dst);
                w.u8(*tag);
                w.reg(*src);
                w.u16("width", usize::from(*width))?;
            }
            Instr::Ite {
                dst,
                cond,
                then,
                other,
            } => {
                w.reg(*dst);
                w.reg(*cond);
                w.reg(*then);
                w.reg(*other);
            }
            Instr::DfaRun { dst, src, table } => {
                w.reg(*dst);
                w.reg(*src);
                if table.m0.len() != table.m1.len() {
                    return Err(EncodeError::TooLarge {
                        what: "dfa row length mismatch",
                        value: table.m1.len(),
                    });
                }
                w.u16("dfa states", table.n_states())?;
                w.u16("dfa start", usize::from(table.start))?;
                w.u16("dfa accept", usize::from(table.accept))?;
                for s in table.m0.iter().chain(&table.m1) {
                    w.u16("dfa state", usize::from(*s))?;
                }
            }
            Instr::Output { src } => w.reg(*src),
        }
    }
    w.u16("class tag length", p.class_tag.len())?;
    w.0.extend_from_slice(p.class_tag.as_bytes());
    Ok(w.0)
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn err(&self, reason: impl Into<String>) -> ParseError {
        ParseError {
            offset: self.pos,
            reason: reason.into(),
        }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8], ParseError> {
        if self.buf.len() - self.pos < n {
            return Err(self.err(format!("truncated: need {n} more bytes")));
        }
        let s = &self.buf[self.pos..self.pos + n];
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, ParseError> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16, ParseError> {
        let b = self.take(2)?;
        Ok(u16::from_be_bytes([b[0], b[1]]))
    }

    fn reg(&mut self) -> Result<Reg, ParseError> {
        self.u16().map(Reg)
    }

    fn bits(&mut self) -> Result<BitStr, ParseError> {
        let start = self.pos;
        let width = usize::from(self.u16()?);
        let bytes = self.take(byte_len(width))?;
        BitStr::from_bytes(width, bytes).map_err(|e| ParseError {
            offset: start,
            reason: e.to_string(),
        })
    }
}

pub fn from_bytes(buf: &[u8]) -> Result<Program, ParseError> {
    let mut r = Reader { buf, pos: 0 };
    if r.take(4)? != MAGIC {
        return Err(ParseError {
            offset: 0,
            reason: "bad magic".into(),
        });
    }
    let input_width = usize::from(r.u16()?);
    let output_width = usize::from(r.u16()?);
    let n_consts = r.u16()?;
    let consts = (0..n_consts)
        .map(|_| r.bits())
        .collect::<Result<Vec<_>, _>>()?;
    let n_instrs = r.u16()?;
    let mut instrs = Vec::with_capacity(usize::from(n_instrs));
    for _ in 0..n_instrs {
        let at = r.pos;
        let op = Opcode::from_byte(r.u8()?).ok_or_else(|| ParseError {
            offset: at,
            reason: "unknown opcode".into(),
        })?;
        let ins = match op {
            Opcode::Const => Instr::Const {
                dst: r.reg()?,
                idx: r.u16()?,
            },
            Opcode::Eq | Opcode::Xor | Opcode::And | Opcode::Or | Opcode::Lt | Opcode::Concat => {
                let (dst, a, b) = (r.reg()?, r.reg()?, r.reg()?);
                match op {
                    Opcode::Eq => Instr::Eq { dst, a, b },
                    Opcode::Xor => Instr::Xor { dst, a, b },
                    Opcode::And => Instr::And { dst, a, b },
                    Opcode::Or => Instr::Or { dst, a, b },
                    Opcode::Lt => Instr::Lt { dst, a, b },
                    _ => Instr::Concat { dst, a, b },
                }
            }
            Opcode::Not => Instr::Not {
                dst: r.reg()?,
                a: r.reg()?,
            },
            Opcode::Project => Instr::Project {
                dst: r.reg()?,
                src: r.reg()?,
                mask: r.bits()?,
            },
            Opcode::Trunc => Instr::Trunc {
                dst: r.reg()?,
                src: r.reg()?,
                width: r.u16()?,
            },
            Opcode::Hash => Instr::Hash {
                dst: r.reg()?,
                tag: r.u8()?,
                src: r.reg()?,
                width: r.u16()?,
            },
            Opcode::Ite => Instr::Ite {
                dst: r.reg()?,
                cond: r.reg()?,
                then: r.reg()?,
                other: r.reg()?,
            },
            Opcode::DfaRun => {
                let dst = r.reg()?;
                let src = r.reg()?;
                let n = usize::from(r.u16()?);
                let start = r.u16()?;
                let accept = r.u16()?;
                let m0 = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>, _>>()?;
                let m1 = (0..n).map(|_| r.u16()).collect::<Result<Vec<_>, _>>()?;
                Instr::DfaRun {
                    dst,
                    src,
                    table: DfaTable {
                        start,
                        accept,
                        m0,
                        m1,
                    },
                }
            }
            Opcode::Output => Instr::Output { src: r.reg()? },
        };
        instrs.push(ins);
    }
    let tag_len = usize::from(r.u16()?);
    let tag_at = r.pos;
    let class_tag = std::str::from_utf8(r.take(tag_len)?)
        .map_err(|_| ParseError {
            offset: tag_at,
            reason: "class tag is not UTF-8".into(),
        })?
        .to_string();
    if r.pos != buf.len() {
        return Err(r.err("trailing bytes"));
    }
    Ok(Program {
        input_width,
        output_width,
        consts,
        instrs,
        class_tag,
    })
}

pub fn to_json(p: &Program) -> Value {
    let instrs: Vec<Value> = p
        .instrs
        .iter()
        .map(|ins| {
            let m = ins.opcode().mnemonic();
            match ins {
                Instr::Const { dst, idx } => json!([m, dst.0, idx]),
                Instr::Eq { dst, a, b }
                | Instr::Xor { dst, a, b }
                | Instr::And { dst, a, b }
                | Instr::Or { dst, a, b }
                | Instr::Lt { dst, a, b }
                | Instr::Concat { dst, a, b } => json!([m, dst.0, a.0, b.0]),
                Instr::Not { dst, a } => json!([m, dst.0, a.0]),
                Instr::Project { dst, src, mask } => json!([m, dst.0, src.0, mask.to_literal()]),
                Instr::Trunc { dst, src, width } => json!([m, dst.0, src.0, width]),
                Instr::Hash {
                    dst,
                    tag,
                    src,
                    width,
                } => json!([m, dst.0, tag, src.0, width]),
                Instr::Ite {
                    dst,
                    cond,
                    then,
                    other,
                } => json!([m, dst.0, cond.0, then.0, other.0]),
                Instr::DfaRun { dst, src, table } => json!([
                    m,
                    dst.0,
                    src.0,
                    {"start": table.start, "accept": table.accept, "m0": table.m0, "m1": table.m1}
                ]),
                Instr::Output { src } => json!([m, src.0]),
            }
        })
        .collect();
    json!({
        "input_width": p.input_width,
        "output_width": p.output_width,
        "consts": p.consts.iter().map(BitStr::to_literal).collect::<Vec<_>>(),
        "instrs": instrs,
        "class_tag": p.class_tag,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid program JSON: {0}")]
pub struct JsonError(pub String);

pub fn from_json(v: &Value) -> Result<Program, JsonError> {
    let err = |s: &str| JsonError(s.to_string());
    let uint = |v: &Value, what: &str| -> Result<u64, JsonError> {
        v.as_u64()
            .ok_or_else(|| JsonError(format!("{what} must be an unsigned integer")))
    };
    let u16_of = |v: &Value, what: &str| -> Result<u16, JsonError> {
        u16::try_from(uint(v, what)?).map_err(|_| JsonError(format!("{what} exceeds 16 bits")))
    };
    let reg = |v: &Value| u16_of(v, "register").map(Reg);

    let consts = v["consts"]
        .as_array()
        .ok_or_else(|| err("consts must be an array"))?
        .iter()
        .map(|c| {
            c.as_str()
                .ok_or_else(|| err("const must be a string"))
                .and_then(|s| BitStr::parse_literal(s).map_err(|e| JsonError(e.to_string())))
        })
        .collect::<Result<Vec<_>, _>>()?;

    let mut instrs = Vec::new();
    for item in v["instrs"]
        .as_array()
        .ok_or_else(|| err("instrs must be an array"))?
    {
        let a = item
            .as_array()
            .ok_or_else(|| err("instr must be an array"))?;
        let m = a
            .first()
            .and_then(Value::as_str)
            .ok_or_else(|| err("missing mnemonic"))?;
        let op =
            Opcode::from_mnemonic(m).ok_or_else(|| JsonError(format!("unknown opcode {m}")))?;
        let arity = match op {
            Opcode::Output => 1,
            Opcode::Const | Opcode::Not => 2,
            Opcode::Ite | Opcode::Hash => 4,
            _ => 3,
        };
        if a.len() != arity + 1 {
            return Err(JsonError(format!("{m} expects {arity} operands")));
        }
        let ins = match op {
            Opcode::Const => Instr::Const {
                dst: reg(&a[1])?,
                idx: u16_of(&a[2], "const index")?,
            },
            Opcode::Eq | Opcode::Xor | Opcode::And | Opcode::Or | Opcode::Lt | Opcode::Concat => {
                let (dst, x, y) = (reg(&a[1])?, reg(&a[2])?, reg(&a[3])?);
                match op {
                    Opcode::Eq => Instr::Eq { dst, a: x, b: y },
                    Opcode::Xor => Instr::Xor { dst, a: x, b: y },
                    Opcode::And => Instr::And { dst, a: x, b: y },
                    Opcode::Or => Instr::Or { dst, a: x, b: y },
                    Opcode::Lt => Instr::Lt { dst, a: x, b: y },
                    _ => Instr::Concat { dst, a: x, b: y },
                }
            }
            Opcode::Not => Instr::Not {
                dst: reg(&a[1])?,
                a: reg(&a[2])?,
            },
            Opcode::Project => Instr::Project {
                dst: reg(&a[1])?,
                src: reg(&a[2])?,
                mask: a[3]
                    .as_str()
                    .ok_or_else(|| err("mask must be a string"))
                    .and_then(|s| BitStr::parse_literal(s).map_err(|e| JsonError(e.to_string())))?,
            },
            Opcode::Trunc => Instr::Trunc {
                dst: reg(&a[1])?,
                src: reg(&a[2])?,
                width: u16_of(&a[3], "width")?,
            },
            Opcode::Hash => Instr::Hash {
                dst: reg(&a[1])?,
                tag: u8::try_from(uint(&a[2], "tag")?).map_err(|_| err("tag exceeds 8 bits"))?,
                src: reg(&a[3])?,
                width: u16_of(&a[4], "width")?,
            },
            Opcode::Ite => Instr::Ite {
                dst: reg(&a[1])?,
                cond: reg(&a[2])?,
                then: reg(&a[3])?,
                other: reg(&a[4])?,
            },
            Opcode::DfaRun => {
                let t = &a[3];
                let row = |k: &str| -> Result<Vec<u16>, JsonError> {
                    t[k].as_array()
                        .ok_or_else(|| JsonError(format!("{k} must be an array")))?
                        .iter()
                        .map(|s| u16_of(s, "state"))
                        .collect()
                };
                Instr::DfaRun {
                    dst: reg(&a[1])?,
                    src: reg(&a[2])?,
                    table: DfaTable {
                        start: u16_of(&t["start"], "start")?,
                        accept: u16_of(&t["accept"], "accept")?,
                        m0: row("m0")?,
                        m1: row("m1")?,
                    },
                }
            }
            Opcode::Output => Instr::Output { src: reg(&a[1])? },
        };
        instrs.push(ins);
    }

    Ok(Program {
        input_width: uint(&v["input_width"], "input_width")? as usize,
        output_width: uint(&v["output_width"], "output_width")? as usize,
        consts,
        instrs,
        class_tag: v["class_tag"].as_str().unwrap_or_default().to_string(),
    })
}
