//! Program classes, assets, obfuscators, attackers, and the security game that ties
//! them together.
//!
//! A [`ProgramClass`] samples `(program, aux)` pairs for a security parameter `n`. An
//! [`AssetSpec`] says what an attacker must recover and how a candidate is checked. An
//! [`Obfuscator`] turns `(program, aux)` into a functionally equal program. An
//! [`Attacker`] sees only the serialized obfuscated program plus public identifiers,
//! and answers with a candidate asset. [`run_security_game`] repeats that experiment
//! and reports the success frequency with a Wilson interval.

mod checks;
mod game;
pub mod seed;
pub mod stats;

use std::ops::RangeInclusive;
use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::ir::{accepts, BitStr, Checked, ExecError, Program};

pub use checks::{
    check_correctness, check_efficiency, compare_programs, CheckMode, Correctness,
    EfficiencyReport, MAX_EXHAUSTIVE_WIDTH,
};
pub use game::{
    play, run_security_game, run_trial, to_csv, GameReport, GameRow, GameSetup, TrialSeeds,
    CSV_HEADER,
};
pub use seed::Seed;

/// A sampled program together with the generator's secret auxiliary data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub n: usize,
    pub program: Program,
    pub aux: Vec<u8>,
}

pub trait ProgramClass: Send + Sync {
    fn id(&self) -> &str;

    fn n_range(&self) -> RangeInclusive<usize>;

    /// Whether `n` is a valid parameter. Narrower than `n_range` for classes with
    /// extra conditions such as evenness.
    fn supports(&self, n: usize) -> bool {
        self.n_range().contains(&n)
    }

    /// Deterministic in `(n, seed)`.
    fn generate(&self, n: usize, seed: &Seed) -> Result<Instance>;

    /// Lower bound on `log2 #C_n`.
    fn class_size_log2(&self, n: usize) -> f64;

    fn assets(&self) -> Vec<Arc<dyn AssetSpec>>;

    /// The asset a game targets when none is named.
    fn default_asset(&self) -> &str;

    /// The asset used for publicly verifiable challenges, if the class has one.
    fn public_asset(&self) -> Option<&str> {
        None
    }

    /// Accepting inputs recoverable from `aux`, checked in sampled correctness mode.
    fn accepting_inputs(&self, inst: &Instance) -> Vec<BitStr>;

    /// Programs of this class read inputs of any width up to the declared one.
    fn length_polymorphic(&self) -> bool {
        false
    }

    fn asset(&self, id: &str) -> Option<Arc<dyn AssetSpec>> {
        self.assets().into_iter().find(|a| a.id() == id)
    }
}

pub fn sample_instance(class: &dyn ProgramClass, n: usize, seed: &Seed) -> Result<Instance> {
    if !class.supports(n) {
        return Err(Error::UnsupportedParameter {
            class: class.id().to_string(),
            n,
        });
    }
    class.generate(n, seed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateSchema {
    /// Right-aligned big-endian bytes of a bit string of this width.
    Bits { width: usize },
    /// UTF-8 JSON `{"n": .., "m0": [..], "m1": [..]}` with 1-based states.
    Dfa,
}

impl CandidateSchema {
    pub fn describe(&self) -> String {
        match self {
            CandidateSchema::Bits { width } => format!("bits:{width}"),
            CandidateSchema::Dfa => "dfa-json".to_string(),
        }
    }
}

pub trait AssetSpec: Send + Sync {
    fn id(&self) -> &str;

    fn schema(&self, n: usize) -> CandidateSchema;

    /// Setter-verifiable when true; publicly verifiable from the obfuscated program otherwise.
    fn needs_aux(&self) -> bool;

    fn verify(&self, inst: &Instance, cand: &[u8]) -> Result<bool>;

    /// Verification from the obfuscated program alone.
    fn verify_public(&self, _program: &Program, _n: usize, _cand: &[u8]) -> Result<bool> {
        Err(Error::FlavourUnsupported {
            asset: self.id().to_string(),
        })
    }

    /// The correct asset, computed from `aux`.
    fn true_asset(&self, inst: &Instance) -> Vec<u8>;

    /// A candidate derived from `cand` that `verify` is guaranteed to reject.
    fn perturb(&self, inst: &Instance, cand: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>>;

    /// What an attacker holding an accepting input of `program` would answer.
    #[allow(clippy::wrong_self_convention)]
    fn from_accepting_input(&self, program: &Program, x: &BitStr) -> Option<Vec<u8>>;

    /// A blind guess.
    fn random_candidate(&self, n: usize, rng: &mut dyn RngCore) -> Vec<u8>;
}

pub fn verify_asset(asset: &dyn AssetSpec, inst: &Instance, cand: &[u8]) -> Result<bool> {
    asset.verify(inst, cand)
}

/// Declared overhead bounds: `|P'| <= size_factor * |P|`, likewise for interpreter steps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overhead {
    pub size_factor: f64,
    pub step_factor: f64,
}

pub trait Obfuscator: Send + Sync {
    fn id(&self) -> &str;

    fn class_id(&self) -> &str;

    fn apply(&self, inst: &Instance, seed: &Seed) -> Result<Program>;

    fn overhead(&self) -> Overhead;

    /// False accepts caused by truncated-hash collisions are reported as collisions
    /// rather than correctness failures.
    fn hash_based(&self) -> bool {
        false
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_queries: u64,
    pub max_steps: u64,
}

impl Budget {
    pub const CODE_ONLY: Budget = Budget {
        max_queries: 0,
        max_steps: 0,
    };
}

/// Everything an attacker is given: the serialized program and public descriptors.
pub struct PublicView<'a> {
    pub program_bytes: &'a [u8],
    pub class_id: &'a str,
    pub obf_id: &'a str,
    pub asset: &'a dyn AssetSpec,
    pub n: usize,
}

impl PublicView<'_> {
    pub fn decode(&self) -> Result<Program> {
        Ok(Program::from_bytes(self.program_bytes)?)
    }
}

/// Budgeted black-box access to the obfuscated program.
pub struct Oracle<'p> {
    checked: Checked<'p>,
    budget: Budget,
    queries: u64,
    steps: u64,
}

impl<'p> Oracle<'p> {
    pub fn new(program: &'p Program, budget: Budget) -> Result<Self> {
        Ok(Self {
            checked: Checked::new(program)?,
            budget,
            queries: 0,
            steps: 0,
        })
    }

    pub fn input_width(&self) -> usize {
        self.checked.program().input_width
    }

    pub fn queries(&self) -> u64 {
        self.queries
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn query(&mut self, x: &BitStr) -> Result<BitStr> {
        if self.queries >= self.budget.max_queries {
            return Err(Error::BudgetExhausted(format!(
                "{} queries",
                self.budget.max_queries
            )));
        }
        let left = self.budget.max_steps.saturating_sub(self.steps);
        let run = self.checked.run_budgeted(x, left).map_err(|e| match e {
            ExecError::BudgetExceeded { .. } => {
                Error::BudgetExhausted(format!("{} steps", self.budget.max_steps))
            }
            other => Error::Exec(other),
        })?;
        self.queries += 1;
        self.steps += run.steps;
        Ok(run.output)
    }

    pub fn accepts(&mut self, x: &BitStr) -> Result<bool> {
        Ok(accepts(&self.query(x)?))
    }
}

pub trait Attacker: Send + Sync {
    fn id(&self) -> &str;

    fn budget(&self) -> Budget;

    fn run(&self, view: &PublicView<'_>, oracle: &mut Oracle<'_>, seed: &Seed) -> Result<Vec<u8>>;
}

pub(crate) fn parse_bits(cand: &[u8], width: usize) -> Result<BitStr> {
    BitStr::from_bytes(width, cand).map_err(|e| Error::Schema(e.to_string()))
}

/// Input-hiding asset: any input the program accepts. Verifiable by running the
/// program, so it needs no secret.
pub struct InputHiding {
    id: &'static str,
    witness: fn(&Instance) -> BitStr,
}

impl InputHiding {
    /// `witness` recovers one accepting input from the instance's aux.
    pub fn new(witness: fn(&Instance) -> BitStr) -> Self {
        Self::named("input", witness)
    }

    pub fn named(id: &'static str, witness: fn(&Instance) -> BitStr) -> Self {
        Self { id, witness }
    }
}

impl AssetSpec for InputHiding {
    fn id(&self) -> &str {
        self.id
    }

    fn schema(&self, n: usize) -> CandidateSchema {
        CandidateSchema::Bits { width: n }
    }

    fn needs_aux(&self) -> bool {
        false
    }

    fn verify(&self, inst: &Instance, cand: &[u8]) -> Result<bool> {
        let x = parse_bits(cand, inst.program.input_width)?;
        Ok(accepts(&crate::ir::execute(&inst.program, &x)?))
    }

    fn verify_public(&self, program: &Program, _n: usize, cand: &[u8]) -> Result<bool> {
        let x = parse_bits(cand, program.input_width)?;
        Ok(accepts(&crate::ir::execute(program, &x)?))
    }

    fn true_asset(&self, inst: &Instance) -> Vec<u8> {
        (self.witness)(inst).into_bytes()
    }

    fn perturb(&self, inst: &Instance, cand: &[u8], rng: &mut dyn RngCore) -> Result<Vec<u8>> {
        let mut x = parse_bits(cand, inst.program.input_width)?;
        let checked = Checked::new(&inst.program)?;
        for _ in 0..4096 {
            x.flip_bit(rng.gen_range(0..x.width()));
            if !accepts(&checked.run(&x)?.output) {
                return Ok(x.into_bytes());
            }
        }
        Err(Error::Precondition(
            "could not find a rejected input near the candidate".into(),
        ))
    }

    fn from_accepting_input(&self, _program: &Program, x: &BitStr) -> Option<Vec<u8>> {
        Some(x.as_bytes().to_vec())
    }

    fn random_candidate(&self, n: usize, rng: &mut dyn RngCore) -> Vec<u8> {
        BitStr::random(n, rng).expect("n >= 1").into_bytes()
    }
}
