//! Finite automata: a DFA class filtered for low acceptance density, a language
//! asset checked by Hopcroft-Karp equivalence, and a permute-and-pad transform that
//! leaves the tables readable.

mod dfa;
mod equiv;

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::formalism::{
    AssetSpec, Attacker, Budget, CandidateSchema, Instance, Obfuscator, Oracle, Overhead,
    ProgramClass, PublicView, Seed,
};
use crate::ir::{BitStr, DfaTable, Instr, Program, ProgramBuilder};

pub use dfa::{dfa_run, Dfa};
pub use equiv::{dfa_equiv, minimize, Equivalence};

pub const CLASS_ID: &str = "automata";

/// `DFARUN x table; OUTPUT`.
pub fn dfa_program(table: DfaTable, input_width: usize) -> Program {
    let mut b = ProgramBuilder::new(input_width, CLASS_ID);
    let r = b.dfa_run(b.input(), table);
    b.output(r)
}

/// Fraction of `samples` uniform words of length `len` that `d` accepts.
pub fn estimate_density<R: Rng + ?Sized>(d: &Dfa, len: usize, samples: usize, rng: &mut R) -> f64 {
    let hits = (0..samples)
        .filter(|_| d.accepts((0..len).map(|_| rng.gen::<bool>())))
        .count();
    hits as f64 / samples as f64
}

/// Input length used for density estimation and as the program's input width.
pub fn word_length(n: usize) -> usize {
    2 * n
}

/// Uniform `n`-state DFAs, redrawn until the estimated density at length `2n` is at most
/// `max_density`.
pub fn gen_dfa(
    n: usize,
    seed: &Seed,
    max_density: f64,
    resample_limit: usize,
    samples: usize,
) -> Result<Instance> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "a DFA needs at least 2 states, got {n}"
        )));
    }
    if samples == 0 {
        return Err(Error::Precondition(
            "density samples must be at least 1".into(),
        ));
    }
    let mut rng = seed.rng();
    let len = word_length(n);
    for _ in 0..resample_limit {
        let d = Dfa::random(n, &mut rng);
        if estimate_density(&d, len, samples, &mut rng) <= max_density {
            return Ok(Instance {
                n,
                program: dfa_program(d.to_table(), len),
                aux: d.to_aux(),
            });
        }
    }
    Err(Error::ResampleLimitExceeded(resample_limit))
}

pub fn dfa_of(inst: &Instance) -> Dfa {
    Dfa::from_aux(&inst.aux).expect("automata aux")
}

#[derive(Debug, Clone, Copy)]
pub struct AutomataClass {
    pub max_density: f64,
    pub resample_limit: usize,
    pub samples: usize,
}

impl Default for AutomataClass {
    fn default() -> Self {
        Self {
            max_density: 0.05,
            resample_limit: 10_000,
            samples: 2000,
        }
    }
}

impl ProgramClass for AutomataClass {
    fn id(&self) -> &str {
        CLASS_ID
    }

    fn n_range(&self) -> RangeInclusive<usize> {
        2..=128
    }

    fn generate(&self, n: usize, seed: &Seed) -> Result<Instance> {
        if !self.n_range().contains(&n) {
            return Err(Error::UnsupportedParameter {
                class: CLASS_ID.into(),
                n,
            });
        }
        gen_dfa(n, seed, self.max_density, self.resample_limit, self.samples)
    }

    /// Uniform table pairs, `n^(2n)`, less the density filter, which is ignored here.
    fn class_size_log2(&self, n: usize) -> f64 {
        2.0 * n as f64 * (n as f64).log2()
    }

    fn assets(&self) -> Vec<Arc<dyn AssetSpec>> {
        vec![Arc::new(LanguageAsset)]
    }

    fn default_asset(&self) -> &str {
        "language"
    }

    fn accepting_inputs(&self, inst: &Instance) -> Vec<BitStr> {
        dfa_of(inst)
            .accepting_word(inst.program.input_width)
            .map(|w| BitStr::from_bits(w).expect("positive length"))
            .into_iter()
            .collect()
    }

    fn length_polymorphic(&self) -> bool {
        true
    }
}

/// Any machine recognising the same language, as DFA JSON.
#[derive(Debug, Clone, Copy, Default)]
pub struct LanguageAsset;

/// Accepts `cand` iff it recognises the language of the instance's DFA.
pub fn verify_automata_asset(inst: &Instance, cand: &Dfa) -> Equivalence {
    dfa_equiv(&dfa_of(inst), cand)
}

fn parse_dfa(cand: &[u8]) -> Result<Dfa> {
    let s = std::str::from_utf8(cand).map_err(|e| Error::MalformedCandidate(e.to_string()))?;
    Dfa::from_json(s)
}

impl AssetSpec for LanguageAsset {
    fn id(&self) -> &str {
        "language"
    }

    fn schema(&self, _n: usize) -> CandidateSchema {
        CandidateSchema::Dfa
    }

    fn needs_aux(&self) -> bool {
        true
    }

    fn verify(&self, inst: &Instance, cand: &[u8]) -> Result<bool> {
        Ok(verify_automata_asset(inst, &parse_dfa(cand)?).is_equivalent())
    }

    fn true_asset(&self, inst: &Instance) -> Vec<u8> {
        dfa_of(inst).to_json().into_bytes()
    }

    /// Redirects random transitions until the language changes. Falls back to the empty
    /// language, or to all non-empty words when the instance language is itself empty.
    fn perturb(&self, inst: &Instance, cand: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        let original = dfa_of(inst);
        let d = parse_dfa(cand)?;
        let n = d.n_states();
        for _ in 0..64 {
            let (mut m0, mut m1) = (d.m0().to_vec(), d.m1().to_vec());
            let row = if rng.gen() { &mut m0 } else { &mut m1 };
            row[rng.gen_range(0..n)] = rng.gen_range(0..n);
            let mutated = Dfa::new(m0, m1)?;
            if !dfa_equiv(&original, &mutated).is_equivalent() {
                return Ok(mutated.to_json().into_bytes());
            }
        }
        let empty = Dfa::new(vec![0, 1], vec![0, 1])?;
        let fallback = if dfa_equiv(&original, &empty).is_equivalent() {
            Dfa::new(vec![1, 1], vec![1, 1])?
        } else {
            empty
        };
        Ok(fallback.to_json().into_bytes())
    }

    fn from_accepting_input(&self, _program: &Program, _x: &BitStr) -> Option<Vec<u8>> {
        None
    }

    fn random_candidate(&self, n: usize, rng: &mut dyn RngCore) -> Vec<u8> {
        Dfa::random(n.max(1), rng).to_json().into_bytes()
    }
}

/// Relabels all states uniformly, including start and accept, after appending
/// `extra_states` unreachable states with random transitions.
#[derive(Debug, Clone)]
pub struct PermutePad {
    pub extra_states: usize,
}

impl Default for PermutePad {
    fn default() -> Self {
        Self { extra_states: 4 }
    }
}

impl Obfuscator for PermutePad {
    fn id(&self) -> &str {
        "obf_dfa_permute_pad"
    }

    fn class_id(&self) -> &str {
        CLASS_ID
    }

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program> {
        let table = match inst.program.instrs.first() {
            Some(Instr::DfaRun { table, .. }) if inst.program.class_tag == CLASS_ID => table,
            _ => {
                return Err(Error::ClassMismatch(
                    CLASS_ID.into(),
                    inst.program.class_tag.clone(),
                ))
            }
        };
        let n = table.n_states();
        let total = n + self.extra_states;
        if total > Dfa::MAX_STATES {
            return Err(Error::Precondition(format!(
                "{total} states exceed the table limit"
            )));
        }
        let mut rng = seed.rng();
        let mut perm: Vec<usize> = (0..total).collect();
        perm.shuffle(&mut rng);

        let mut m0 = vec![0u16; total];
        let mut m1 = vec![0u16; total];
        for s in 0..total {
            let (t0, t1) = if s < n {
                (usize::from(table.m0[s]), usize::from(table.m1[s]))
            } else {
                (rng.gen_range(0..total), rng.gen_range(0..total))
            };
            m0[perm[s]] = perm[t0] as u16;
            m1[perm[s]] = perm[t1] as u16;
        }
        let padded = DfaTable {
            start: perm[usize::from(table.start)] as u16,
            accept: perm[usize::from(table.accept)] as u16,
            m0,
            m1,
        };
        Ok(dfa_program(padded, inst.program.input_width))
    }

    fn overhead(&self) -> Overhead {
        Overhead {
            size_factor: 1.0 + self.extra_states as f64 / 2.0,
            step_factor: 1.0,
        }
    }
}

/// Copies the embedded transition tables out of the program.
#[derive(Debug, Clone, Copy, Default)]
pub struct TableReader;

impl TableReader {
    pub fn extract(p: &Program) -> Result<Dfa> {
        let out = p
            .output_reg()
            .ok_or_else(|| Error::TemplateMismatch("no output".into()))?;
        match p.definition(out) {
            Some(Instr::DfaRun { src, table, .. }) if *src == crate::ir::Reg::INPUT => {
                Dfa::from_table(table)
            }
            _ => Err(Error::TemplateMismatch(
                "output is not a DFA run on the input".into(),
            )),
        }
    }
}

impl Attacker for TableReader {
    fn id(&self) -> &str {
        "table_reader"
    }

    fn budget(&self) -> Budget {
        Budget::CODE_ONLY
    }

    fn run(
        &self,
        view: &PublicView<'_>,
        _oracle: &mut Oracle<'_>,
        _seed: &Seed,
    ) -> Result<Vec<u8>> {
        Ok(Self::extract(&view.decode()?)?.to_json().into_bytes())
    }
}

#[cfg(test)]
mod tests;
