//! The program language shared by every class: loop-free predicate bytecode over
//! fixed-width bit strings, with a total, step-counted interpreter.

mod bits;
pub mod hash;
mod interp;
mod program;
mod validate;
pub mod wire;

pub use bits::{BitStr, BitsError};
pub use interp::{accepts, execute, Checked, ExecError, Execution};
pub use program::{DfaTable, Instr, Opcode, Program, ProgramBuilder, Reg};
pub use validate::{validate, MalformedProgram, MAX_WIDTH};
pub use wire::{EncodeError, ParseError};

impl Program {
    /// Canonical binary encoding.
    pub fn to_bytes(&self) -> Result<Vec<u8>, EncodeError> {
        wire::to_bytes(self)
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self, ParseError> {
        wire::from_bytes(buf)
    }

    pub fn to_json(&self) -> serde_json::Value {
        wire::to_json(self)
    }
}

#[cfg(test)]
mod tests;
