//! Scenario configuration: TOML sections with embedded defaults, so every
//! command also runs with no config file at all.

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use duopoly_core::abm::AbmConfig;
use duopoly_core::bass::{BassParams, MarketState};
use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub output_dir: PathBuf,
    pub rng_seed: u64,
    pub bass: BassSection,
    pub abm: AbmSection,
    pub sweep: SweepSection,
    pub fit: FitSection,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            rng_seed: 1,
            bass: BassSection::default(),
            abm: AbmSection::default(),
            sweep: SweepSection::default(),
            fit: FitSection::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("cannot parse config {}", path.display()))
    }
}

/// Macroscopic model parameters plus integration window.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BassSection {
    pub p1: f64,
    pub q11: f64,
    pub p2: f64,
    pub q22: f64,
    pub q12: f64,
    pub q21: f64,
    pub n1_0: f64,
    pub n2_0: f64,
    pub t_end: f64,
    pub dt: f64,
}

impl Default for BassSection {
    fn default() -> Self {
        Self {
            p1: 0.03,
            q11: 0.38,
            p2: 0.06,
            q22: 0.68,
            q12: 0.0,
            q21: 0.0,
            n1_0: 0.0,
            n2_0: 0.0,
            t_end: 300.0,
            dt: duopoly_core::bass::DEFAULT_DT,
        }
    }
}

impl BassSection {
    pub fn params(&self) -> Result<BassParams> {
        let params = BassParams::new(self.p1, self.q11, self.p2, self.q22, self.q12, self.q21);
        params.validate()?;
        Ok(params)
    }

    pub fn init(&self) -> Result<MarketState> {
        let init = MarketState::new(0.0, self.n1_0, self.n2_0);
        init.validate()?;
        Ok(init)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AbmSection {
    pub n_agents: usize,
    pub k: usize,
    pub p_rewire: f64,
    pub utilities: [f64; 3],
    pub gamma1: usize,
    pub gamma2: usize,
    pub max_ticks: usize,
    pub replicates: usize,
}

impl Default for AbmSection {
    fn default() -> Self {
        let d = AbmConfig::default();
        Self {
            n_agents: d.n_agents,
            k: d.k,
            p_rewire: d.p_rewire,
            utilities: d.utilities,
            gamma1: d.gamma1,
            gamma2: d.gamma2,
            max_ticks: d.max_ticks,
            replicates: 1,
        }
    }
}

impl AbmSection {
    pub fn to_config(&self, rng_seed: u64) -> Result<AbmConfig> {
        let config = AbmConfig {
            n_agents: self.n_agents,
            k: self.k,
            p_rewire: self.p_rewire,
            utilities: self.utilities,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            max_ticks: self.max_ticks,
            rng_seed,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Equilibrium sweeps (`imitation`, `innovation`) and the cross-term
/// trajectory sweep (`cross`).
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    pub kind: String,
    pub p1: f64,
    pub q11: f64,
    pub p2: f64,
    pub q22: f64,
    /// Coefficient increments for the equilibrium sweeps; empty selects a
    /// kind-specific default grid.
    pub deltas: Vec<f64>,
    /// `(q12, q21)` cases for the cross sweep.
    pub cross_cases: Vec<[f64; 2]>,
    pub t_end: f64,
    pub dt: f64,
    /// Output thinning stride for the cross sweep (1 = every sample).
    pub stride: usize,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            kind: String::from("cross"),
            p1: 0.03,
            q11: 0.38,
            p2: 0.06,
            q22: 0.68,
            deltas: Vec::new(),
            cross_cases: vec![[0.0, 0.0], [0.0, 0.5], [0.5, 0.0], [0.5, 0.5]],
            t_end: 300.0,
            dt: duopoly_core::bass::DEFAULT_DT,
            stride: 10,
        }
    }
}

/// Ensemble size and optimizer budget for the comparison experiments.
#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSection {
    pub replicates: usize,
    pub monopoly_max_evals: usize,
}

impl Default for FitSection {
    fn default() -> Self {
        Self { replicates: 20, monopoly_max_evals: 4000 }
    }
}
