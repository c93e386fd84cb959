use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::registry;
use crate::error::{Error, Result};
use crate::formalism::{
    play, AssetSpec, Attacker, GameReport, GameRow, GameSetup, Obfuscator, ProgramClass, Seed,
};

/// One game over an n-grid, named by registry ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Experiment {
    pub class: String,
    /// The class's default asset when unset.
    pub asset: Option<String>,
    pub obf: String,
    pub attacker: String,
    pub grid: Vec<usize>,
    pub trials: u64,
    pub seed: String,
}

pub struct Resolved {
    pub class: Arc<dyn ProgramClass>,
    pub asset: Arc<dyn AssetSpec>,
    pub obf: Arc<dyn Obfuscator>,
    pub attacker: Arc<dyn Attacker>,
    pub seed: Seed,
}

impl Resolved {
    pub fn setup(&self) -> GameSetup<'_> {
        GameSetup {
            class: self.class.as_ref(),
            asset: self.asset.as_ref(),
            obf: self.obf.as_ref(),
            attacker: self.attacker.as_ref(),
        }
    }
}

impl Experiment {
    /// Looks up every id and checks the grid against the class.
    pub fn resolve(&self) -> Result<Resolved> {
        let class = registry::class(&self.class)?;
        let asset_id = self.asset.as_deref().unwrap_or(class.default_asset());
        let asset = class.asset(asset_id).ok_or_else(|| Error::UnknownId {
            kind: "asset",
            id: asset_id.to_string(),
        })?;
        let obf = registry::obfuscator(&self.obf)?;
        if obf.class_id() != class.id() {
            return Err(Error::ClassMismatch(
                obf.class_id().to_string(),
                class.id().to_string(),
            ));
        }
        let attacker = registry::attacker(&self.attacker)?;
        if self.grid.is_empty() {
            return Err(Error::Precondition("empty n-grid".into()));
        }
        if let Some(&n) = self.grid.iter().find(|&&n| !class.supports(n)) {
            return Err(Error::UnsupportedParameter {
                class: class.id().to_string(),
                n,
            });
        }
        if self.trials == 0 {
            return Err(Error::Precondition("trials must be at least 1".into()));
        }
        let seed = Seed::from_hex(&self.seed)?;
        Ok(Resolved {
            class,
            asset,
            obf,
            attacker,
            seed,
        })
    }

    pub fn run(&self) -> Result<GameReport> {
        let r = self.resolve()?;
        play(r.setup(), &self.grid, self.trials, &r.seed)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExperimentPlan {
    pub experiments: Vec<Experiment>,
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<()> {
        self.experiments
            .iter()
            .try_for_each(|e| e.resolve().map(drop))
    }

    /// Runs every experiment, concurrently, returning reports in plan order.
    pub fn run(&self) -> Result<Vec<GameReport>> {
        self.validate()?;
        self.experiments.par_iter().map(Experiment::run).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decay {
    /// Change in `log2 p` per unit of `n`.
    pub slope: f64,
    pub intercept: f64,
}

/// Least-squares line through `(n, log2 p_hat)`. Rows without successes use
/// `log2 ci_high`, an upper bound.
pub fn fit_decay(rows: &[GameRow]) -> Result<Decay> {
    if rows.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need at least 3 grid points, got {}",
            rows.len()
        )));
    }
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let p = if r.successes == 0 { r.ci_high } else { r.p_hat };
            (r.n as f64, p.log2())
        })
        .collect();
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all grid points share one n".into(),
        ));
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Ok(Decay {
        slope,
        intercept: my - slope * mx,
    })
}
