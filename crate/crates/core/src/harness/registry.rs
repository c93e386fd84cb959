use std::sync::Arc;

use crate::automata::{AutomataClass, PermutePad, TableReader};
use crate::compose::{compose, HalfCodeReader, HalfObf, SplitConjClass};
use crate::error::{Error, Result};
use crate::evasive::{CcClass, CcObf, PatternClass, PatternHashObf};
use crate::formalism::{Attacker, Obfuscator, ProgramClass};
use crate::pointfn::{
    BruteForce, ConstReader, HashPointObf, PointClass, XorCodeReader, XorPointObf,
};

pub const CLASS_IDS: [&str; 5] = ["pointfn", "pattern", "cc", "automata", "splitconj"];

pub const OBFUSCATOR_IDS: [&str; 7] = [
    "obf_hash",
    "obf_xor",
    "obf_pattern_hash",
    "obf_cc",
    "obf_dfa_permute_pad",
    "obf_half1",
    "obf_half2",
];

pub const ATTACKER_IDS: [&str; 6] = [
    "xor_codereader",
    "bruteforce",
    "constreader",
    "half_codereader1",
    "half_codereader2",
    "table_reader",
];

fn unknown(kind: &'static str, id: &str) -> Error {
    Error::UnknownId {
        kind,
        id: id.to_string(),
    }
}

pub fn class(id: &str) -> Result<Arc<dyn ProgramClass>> {
    Ok(match id {
        "pointfn" => Arc::new(PointClass),
        "pattern" => Arc::new(PatternClass::default()),
        "cc" => Arc::new(CcClass),
        "automata" => Arc::new(AutomataClass::default()),
        "splitconj" => Arc::new(SplitConjClass),
        _ => return Err(unknown("class", id)),
    })
}

fn single_obfuscator(id: &str) -> Result<Arc<dyn Obfuscator>> {
    Ok(match id {
        "obf_hash" => Arc::new(HashPointObf),
        "obf_xor" => Arc::new(XorPointObf),
        "obf_pattern_hash" => Arc::new(PatternHashObf),
        "obf_cc" => Arc::new(CcObf),
        "obf_dfa_permute_pad" => Arc::new(PermutePad::default()),
        "obf_half1" => Arc::new(HalfObf::new(1)),
        "obf_half2" => Arc::new(HalfObf::new(2)),
        _ => return Err(unknown("obfuscator", id)),
    })
}

/// A registered obfuscator, or a `+`-separated chain applied left to right.
pub fn obfuscator(id: &str) -> Result<Arc<dyn Obfuscator>> {
    let mut parts = id.split('+');
    let first = single_obfuscator(parts.next().unwrap_or_default())?;
    parts.try_fold(first, |acc, part| {
        Ok(Arc::new(compose(acc, single_obfuscator(part)?)?) as Arc<dyn Obfuscator>)
    })
}

/// A registered attacker. `bruteforce:<q>` sets the query budget.
pub fn attacker(id: &str) -> Result<Arc<dyn Attacker>> {
    if let Some(q) = id.strip_prefix("bruteforce:") {
        let q = q.parse().map_err(|_| unknown("attacker", id))?;
        return Ok(Arc::new(BruteForce::new(q)?));
    }
    Ok(match id {
        "xor_codereader" => Arc::new(XorCodeReader),
        "bruteforce" => Arc::new(BruteForce::new(BruteForce::DEFAULT_Q)?),
        "constreader" => Arc::new(ConstReader),
        "half_codereader1" => Arc::new(HalfCodeReader::new(1)),
        "half_codereader2" => Arc::new(HalfCodeReader::new(2)),
        "table_reader" => Arc::new(TableReader),
        _ => return Err(unknown("attacker", id)),
    })
}
