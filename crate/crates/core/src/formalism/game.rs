use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::stats::{wilson, Z95};
use super::{AssetSpec, Attacker, Obfuscator, Oracle, ProgramClass, PublicView, Seed};
use crate::error::{Error, Result};
use crate::ir::Program;

/// The four components of one security experiment.
#[derive(Clone, Copy)]
pub struct GameSetup<'a> {
    pub class: &'a dyn ProgramClass,
    pub asset: &'a dyn AssetSpec,
    pub obf: &'a dyn Obfuscator,
    pub attacker: &'a dyn Attacker,
}

/// Seeds of one trial, all derived from `H(top || index)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialSeeds {
    pub instance: Seed,
    pub obfuscation: Seed,
    pub attack: Seed,
}

impl TrialSeeds {
    pub fn new(top: &Seed, index: u64) -> Self {
        let t = top.trial(index);
        Self {
            instance: t.derive("instance"),
            obfuscation: t.derive("obfuscation"),
            attack: t.derive("attack"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameRow {
    pub n: usize,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Trials that ended in an error rather than a candidate. Counted as failures.
    #[serde(skip)]
    pub errors: u64,
}

impl GameRow {
    pub fn from_counts(n: usize, trials: u64, successes: u64, errors: u64) -> Self {
        let (ci_low, ci_high) = wilson(successes, trials, Z95);
        Self {
            n,
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            errors,
        }
    }

    pub fn ci_width(&self) -> f64 {
        self.ci_high - self.ci_low
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub class_id: String,
    pub obf_id: String,
    pub attacker_id: String,
    pub asset_id: String,
    pub seed: String,
    pub rows: Vec<GameRow>,
}

pub const CSV_HEADER: &str =
    "class_id,obf_id,attacker_id,n,trials,successes,p_hat,ci_low,ci_high,seed";

impl GameReport {
    pub fn csv_lines(&self) -> Vec<String> {
        self.rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{},{},{},{},{},{}",
                    self.class_id,
                    self.obf_id,
                    self.attacker_id,
                    r.n,
                    r.trials,
                    r.successes,
                    r.p_hat,
                    r.ci_low,
                    r.ci_high,
                    self.seed
                )
            })
            .collect()
    }

    pub fn to_csv(&self) -> String {
        to_csv(std::slice::from_ref(self))
    }
}

/// CSV of several reports under one header.
pub fn to_csv(reports: &[GameReport]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for line in reports.iter().flat_map(GameReport::csv_lines) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// One trial: sample, obfuscate, attack the serialized program, verify against aux.
pub fn run_trial(setup: GameSetup<'_>, n: usize, seeds: &TrialSeeds) -> Result<bool> {
    let inst = setup.class.generate(n, &seeds.instance)?;
    let obfuscated = setup.obf.apply(&inst, &seeds.obfuscation)?;
    let bytes = obfuscated.to_bytes()?;
    drop(obfuscated);

    // The attacker sees only these bytes; its oracle runs what they decode to.
    let exposed = Program::from_bytes(&bytes)?;
    let mut oracle = Oracle::new(&exposed, setup.attacker.budget())?;
    let view = PublicView {
        program_bytes: &bytes,
        class_id: setup.class.id(),
        obf_id: setup.obf.id(),
        asset: setup.asset,
        n,
    };
    let cand = setup.attacker.run(&view, &mut oracle, &seeds.attack)?;
    setup.asset.verify(&inst, &cand)
}

pub fn run_security_game(
    setup: GameSetup<'_>,
    n: usize,
    trials: u64,
    seed: &Seed,
) -> Result<GameRow> {
    if trials == 0 {
        return Err(Error::Precondition("trials must be at least 1".into()));
    }
    if !setup.class.supports(n) {
        return Err(Error::UnsupportedParameter {
            class: setup.class.id().to_string(),
            n,
        });
    }
    if setup.obf.class_id() != setup.class.id() {
        return Err(Error::ClassMismatch(
            setup.obf.class_id().to_string(),
            setup.class.id().to_string(),
        ));
    }
    let (successes, errors) = (0..trials)
        .into_par_iter()
        .map(|i| match run_trial(setup, n, &TrialSeeds::new(seed, i)) {
            Ok(true) => (1u64, 0u64),
            Ok(false) => (0, 0),
            Err(_) => (0, 1),
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(GameRow::from_counts(n, trials, successes, errors))
}

/// Runs the game at every grid point with the same top-level seed.
pub fn play(setup: GameSetup<'_>, grid: &[usize], trials: u64, seed: &Seed) -> Result<GameReport> {
    let rows = grid
        .iter()
        .map(|&n| run_security_game(setup, n, trials, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(GameReport {
        class_id: setup.class.id().to_string(),
        obf_id: setup.obf.id().to_string(),
        attacker_id: setup.attacker.id().to_string(),
        asset_id: setup.asset.id().to_string(),
        seed: seed.to_hex(),
        rows,
    })
}
