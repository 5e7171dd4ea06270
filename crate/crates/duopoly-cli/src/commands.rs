//! Subcommand implementations.

use anyhow::{bail, Context, Result};
use duopoly_core::bass::{integrate_to_saturation, StopReason, SATURATION_TOL};
use duopoly_core::equilibrium::{solve_within_brand_equilibrium, sweep_fig1, sweep_fig2, SweepKind};

use crate::config::ScenarioConfig;
use crate::output::{
    ensure_dir, fit_report, fmt_f64, write_csv, write_json, write_trajectory_csv,
};
use crate::pipeline;

pub fn simulate_bass(cfg: &ScenarioConfig) -> Result<()> {
    let bass = &cfg.bass;
    let params = bass.params()?;
    let init = bass.init()?;
    let (traj, stop) = integrate_to_saturation(&params, &init, bass.dt, SATURATION_TOL, bass.t_end)
        .context("integration failed")?;
    write_trajectory_csv(&cfg.output_dir, "bass.csv", traj.samples())?;
    let f = traj.final_state();
    let status = match stop {
        StopReason::Saturated => "saturation reached",
        StopReason::HorizonReached => "horizon reached before saturation",
    };
    println!("final state: t={} n1={} n2={} ({status})", f.t, f.n1, f.n2);
    Ok(())
}

pub fn simulate_abm(cfg: &ScenarioConfig, replicates: Option<usize>) -> Result<()> {
    let replicates = replicates.unwrap_or(cfg.abm.replicates);
    let config = cfg.abm.to_config(cfg.rng_seed)?;
    if replicates <= 1 {
        let traj = duopoly_core::abm::run(&config)?;
        write_trajectory_csv(&cfg.output_dir, "abm.csv", traj.samples())?;
        let f = traj.final_state();
        println!("final state: t={} n1={} n2={}", f.t, f.n1, f.n2);
    } else {
        let ens = duopoly_core::abm::ensemble(&config, replicates)?;
        let rows: Vec<Vec<String>> = ens
            .samples()
            .iter()
            .map(|s| {
                vec![fmt_f64(s.t), fmt_f64(s.n1), fmt_f64(s.n2), fmt_f64(s.n1_sd), fmt_f64(s.n2_sd)]
            })
            .collect();
        write_csv(&cfg.output_dir, "abm.csv", "t,n1,n2,n1_sd,n2_sd", &rows)?;
        let last = ens.samples().last().unwrap();
        println!("final mean state: t={} n1={} n2={} ({replicates} replicates)", last.t, last.n1, last.n2);
    }
    Ok(())
}

pub fn equilibrium(cfg: &ScenarioConfig) -> Result<()> {
    let b = &cfg.bass;
    b.params()?;
    let eq = solve_within_brand_equilibrium(b.p1, b.p2, b.q11, b.q22)
        .context("equilibrium solve failed")?;
    write_json(
        &cfg.output_dir,
        "equilibrium.json",
        &serde_json::json!({ "n1": eq.n1, "n2": eq.n2 }),
    )?;
    println!("equilibrium split: n1={} n2={}", eq.n1, eq.n2);
    Ok(())
}

pub fn sweep(cfg: &ScenarioConfig) -> Result<()> {
    let s = &cfg.sweep;
    let base = duopoly_core::bass::BassParams::within_brand(s.p1, s.q11, s.p2, s.q22);
    base.validate()?;
    match s.kind.as_str() {
        "imitation" | "innovation" => {
            let kind = if s.kind == "imitation" { SweepKind::Imitation } else { SweepKind::Innovation };
            let deltas: Vec<f64> = if s.deltas.is_empty() {
                match kind {
                    SweepKind::Imitation => (0..=8).map(|i| 0.1 * i as f64).collect(),
                    SweepKind::Innovation => (0..=9).map(|i| 0.01 * i as f64).collect(),
                }
            } else {
                s.deltas.clone()
            };
            let rows = sweep_fig1(&base, &deltas, kind)?;
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![fmt_f64(r.delta), fmt_f64(r.n1), fmt_f64(r.n2)])
                .collect();
            let name = format!("sweep_{}.csv", s.kind);
            write_csv(&cfg.output_dir, &name, "delta,n1,n2", &cells)?;
            println!("{} rows written to {name}", rows.len());
        }
        "cross" => {
            let cases: Vec<(f64, f64)> = s.cross_cases.iter().map(|c| (c[0], c[1])).collect();
            let trajectories = sweep_fig2(&base, &cases, s.t_end, s.dt)?;
            let rows = cross_sweep_rows(&trajectories, s.stride.max(1));
            write_csv(&cfg.output_dir, "sweep_cross.csv", "case,t,n1,n2", &rows)?;
            println!("{} cases written to sweep_cross.csv", trajectories.len());
        }
        other => bail!("unknown sweep kind '{other}' (expected imitation, innovation or cross)"),
    }
    Ok(())
}

/// Long-format rows labeled A, B, C, ... per case.
pub fn cross_sweep_rows(
    trajectories: &[duopoly_core::bass::Trajectory],
    stride: usize,
) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for (i, traj) in trajectories.iter().enumerate() {
        let label = char::from(b'A' + i as u8).to_string();
        for s in traj.thin(stride).samples() {
            rows.push(vec![label.clone(), fmt_f64(s.t), fmt_f64(s.n1), fmt_f64(s.n2)]);
        }
    }
    rows
}

pub fn fit(cfg: &ScenarioConfig, replicates: Option<usize>) -> Result<()> {
    let replicates = replicates.unwrap_or(cfg.fit.replicates);
    ensure_dir(&cfg.output_dir)?;
    let pipe = pipeline::run_pipeline(&cfg.abm, &cfg.fit, cfg.rng_seed, replicates)?;
    write_json(&cfg.output_dir, "fit_calibration.json", &crate::output::calibration_report(&pipe))?;
    write_trajectory_csv(&cfg.output_dir, "fit_target.csv", &pipe.target.mean_curve())?;
    let mut all_converged = true;
    for exp in &pipe.experiments {
        let name = format!("fit_exp{}.json", exp.experiment);
        write_json(&cfg.output_dir, &name, &fit_report(exp.experiment, &exp.fit))?;
        all_converged &= exp.fit.converged;
        println!(
            "experiment {}: sse={:.6e} r2=[{:.6}, {:.6}] area_diff={:.4}% converged={}",
            exp.experiment,
            exp.fit.sse,
            exp.fit.r2[0],
            exp.fit.r2[1],
            exp.fit.area_diff_pct,
            exp.fit.converged
        );
    }
    if !all_converged {
        bail!("at least one experiment did not converge");
    }
    Ok(())
}
