//! Asset-based obfuscation experiments over a small straight-line program IR.

pub mod automata;
pub mod compose;
pub mod error;
pub mod evasive;
pub mod formalism;
pub mod harness;
pub mod ir;
pub mod pointfn;

pub use error::{Error, Result};
