//! Micro-to-macro pipeline: monopoly calibration of each brand, then the
//! four comparison experiments against a duopoly ensemble target.

use anyhow::{Context, Result};
use duopoly_core::abm::{ensemble, AbmConfig, EnsembleTrajectory};
use duopoly_core::bass::BassParams;
use duopoly_core::fitting::{run_experiments, ExperimentResult, SingleFitResult};

use crate::config::{AbmSection, FitSection};

/// Seed offsets keep the three ensembles on disjoint replicate seeds.
const SEED_STRIDE: u64 = 10_000;

pub struct MonopolyOutcome {
    pub ensemble: EnsembleTrajectory,
    pub fit: SingleFitResult,
}

/// Runs one brand alone (the other gets zero seeding and an unreachable
/// utility) and fits the single-brand closed form to the mean curve.
pub fn monopoly(
    brand: u8,
    section: &AbmSection,
    rng_seed: u64,
    replicates: usize,
    max_evals: usize,
) -> Result<MonopolyOutcome> {
    let mut config = section.to_config(rng_seed)?;
    match brand {
        1 => {
            config.gamma2 = 0;
            config.utilities[1] = f64::NEG_INFINITY;
        }
        2 => {
            config.gamma1 = 0;
            config.utilities[0] = f64::NEG_INFINITY;
        }
        _ => anyhow::bail!("brand must be 1 or 2"),
    }
    let ens = ensemble(&config, replicates).context("monopoly ensemble failed")?;
    let target: Vec<(f64, f64)> = ens
        .samples()
        .iter()
        .map(|s| (s.t, if brand == 1 { s.n1 } else { s.n2 }))
        .collect();
    let seed_fraction =
        if brand == 1 { config.seed_fraction1() } else { config.seed_fraction2() };
    let fit = duopoly_core::fitting::fit_single_brand(&target, (seed_fraction, 0.3), max_evals)
        .context("monopoly fit failed")?;
    log::info!(
        "brand {brand} monopoly fit: p={:.6} q={:.6} sse={:.3e} r2={:.6}",
        fit.p,
        fit.q,
        fit.sse,
        fit.r2
    );
    Ok(MonopolyOutcome { ensemble: ens, fit })
}

pub struct ExperimentPipeline {
    pub base: BassParams,
    pub monopoly1: MonopolyOutcome,
    pub monopoly2: MonopolyOutcome,
    pub duopoly_config: AbmConfig,
    pub target: EnsembleTrajectory,
    pub experiments: Vec<ExperimentResult>,
}

/// Full reproduction pipeline given the duopoly ABM section.
pub fn run_pipeline(
    abm: &AbmSection,
    fit: &FitSection,
    rng_seed: u64,
    replicates: usize,
) -> Result<ExperimentPipeline> {
    let monopoly1 = monopoly(1, abm, rng_seed, replicates, fit.monopoly_max_evals)?;
    let monopoly2 =
        monopoly(2, abm, rng_seed + SEED_STRIDE, replicates, fit.monopoly_max_evals)?;
    let base = BassParams::within_brand(
        monopoly1.fit.p,
        monopoly1.fit.q,
        monopoly2.fit.p,
        monopoly2.fit.q,
    );

    let duopoly_config = abm.to_config(rng_seed + 2 * SEED_STRIDE)?;
    let target =
        ensemble(&duopoly_config, replicates).context("duopoly ensemble failed")?;
    let experiments = run_experiments(&target.mean_curve(), &base)
        .context("comparison experiments failed")?;
    Ok(ExperimentPipeline { base, monopoly1, monopoly2, duopoly_config, target, experiments })
}
