//! One-command reproduction bundles: equilibrium sweeps, cross-term
//! trajectory comparison, monopoly calibration, the four comparison
//! experiments, and the equilibrium-proportion table.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use duopoly_core::bass::{
    closed_form_single, integrate_to_saturation, BassParams, MarketState, SingleBrandParams,
    DEFAULT_DT,
};
use duopoly_core::equilibrium::{
    solve_within_brand_equilibrium, sweep_fig1, sweep_fig2_default, EquilibriumPoint, SweepKind,
};
use duopoly_core::fitting::{match_final_proportions, model_curve};

use crate::commands::cross_sweep_rows;
use crate::config::ScenarioConfig;
use crate::output::{fit_report, fmt_f64, write_csv, write_json, write_text, write_trajectory_csv};
use crate::pipeline;

pub fn run(cfg: &ScenarioConfig, id: &str, replicates: Option<usize>) -> Result<()> {
    let replicates = replicates.unwrap_or(cfg.fit.replicates);
    let artifacts = match id {
        "fig1" => fig1(cfg)?,
        "fig2" => fig2(cfg)?,
        "fig3" => fig3(cfg, replicates)?,
        "fig4" => fig4(cfg, replicates)?,
        "table-eq" => table_eq(cfg, replicates)?,
        other => bail!("unknown figure id '{other}' (expected fig1, fig2, fig3, fig4, table-eq)"),
    };
    for path in artifacts {
        println!("{}", path.display());
    }
    Ok(())
}

/// Equilibrium split vs coefficient increments, two scenarios.
fn fig1(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let mut artifacts = Vec::new();

    // Scenario 1: equal innovation, brand 2 gains imitation strength.
    let base_q = BassParams::within_brand(0.03, 0.2, 0.03, 0.2);
    let dq: Vec<f64> = (0..=8).map(|i| 0.1 * i as f64).collect();
    let rows = sweep_fig1(&base_q, &dq, SweepKind::Imitation)?;
    let cells: Vec<Vec<String>> =
        rows.iter().map(|r| vec![fmt_f64(r.delta), fmt_f64(r.n1), fmt_f64(r.n2)]).collect();
    artifacts.push(write_csv(dir, "fig1_imitation.csv", "delta,n1,n2", &cells)?);

    // Scenario 2: equal imitation, brand 2 gains innovation strength.
    let base_p = BassParams::within_brand(0.01, 0.4, 0.01, 0.4);
    let dp: Vec<f64> = (0..=9).map(|i| 0.01 * i as f64).collect();
    let rows = sweep_fig1(&base_p, &dp, SweepKind::Innovation)?;
    let cells: Vec<Vec<String>> =
        rows.iter().map(|r| vec![fmt_f64(r.delta), fmt_f64(r.n1), fmt_f64(r.n2)]).collect();
    artifacts.push(write_csv(dir, "fig1_innovation.csv", "delta,n1,n2", &cells)?);

    let script = "set datafile separator ','\n\
        set xlabel 'increment'\n\
        set ylabel 'final proportion of adopters'\n\
        set key left center\n\
        set multiplot layout 1,2\n\
        set title 'imitation sweep'\n\
        plot 'fig1_imitation.csv' using 1:2 skip 1 with linespoints title 'n1', \\\n\
        \x20    'fig1_imitation.csv' using 1:3 skip 1 with linespoints title 'n2'\n\
        set title 'innovation sweep'\n\
        plot 'fig1_innovation.csv' using 1:2 skip 1 with linespoints title 'n1', \\\n\
        \x20    'fig1_innovation.csv' using 1:3 skip 1 with linespoints title 'n2'\n\
        unset multiplot\n";
    artifacts.push(write_text(dir, "fig1.gp", script)?);
    Ok(artifacts)
}

/// Cross-influence trajectory cases A-D on a fixed asymmetric duopoly.
fn fig2(cfg: &ScenarioConfig) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let params = BassParams::within_brand(0.03, 0.38, 0.06, 0.68);
    let cases = [(0.0, 0.0), (0.0, 0.5), (0.5, 0.0), (0.5, 0.5)];
    let trajectories = sweep_fig2_default(&params, &cases)?;
    let rows = cross_sweep_rows(&trajectories, 10);
    let mut artifacts = vec![write_csv(dir, "fig2.csv", "case,t,n1,n2", &rows)?];

    let mut script = String::from(
        "set datafile separator ','\n\
         set xlabel 't'\n\
         set ylabel 'proportion of adopters'\n\
         set key right bottom\n\
         plot \\\n",
    );
    let mut lines = Vec::new();
    for (i, _) in cases.iter().enumerate() {
        let label = char::from(b'A' + i as u8);
        for (col, brand) in [(3, "n1"), (4, "n2")] {
            lines.push(format!(
                "  'fig2.csv' using (strcol(1) eq '{label}' ? $2 : NaN):${col} skip 1 \
                 with lines title '{label} {brand}'"
            ));
        }
    }
    script.push_str(&lines.join(", \\\n"));
    script.push('\n');
    artifacts.push(write_text(dir, "fig2.gp", &script)?);
    Ok(artifacts)
}

/// Monopoly adoption curve vs fitted single-brand closed form.
fn fig3(cfg: &ScenarioConfig, replicates: usize) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let outcome =
        pipeline::monopoly(1, &cfg.abm, cfg.rng_seed, replicates, cfg.fit.monopoly_max_evals)?;
    let rows: Vec<Vec<String>> = outcome
        .ensemble
        .samples()
        .iter()
        .map(|s| vec![fmt_f64(s.t), fmt_f64(s.n1), fmt_f64(s.n1_sd)])
        .collect();
    let mut artifacts = vec![write_csv(dir, "fig3_abm.csv", "t,n1,n1_sd", &rows)?];

    let sb = SingleBrandParams::new(outcome.fit.p, outcome.fit.q);
    let model_rows: Vec<Vec<String>> = outcome
        .ensemble
        .samples()
        .iter()
        .map(|s| Ok(vec![fmt_f64(s.t), fmt_f64(closed_form_single(&sb, s.t)?)]))
        .collect::<duopoly_core::Result<_>>()?;
    artifacts.push(write_csv(dir, "fig3_model.csv", "t,n", &model_rows)?);

    artifacts.push(write_json(
        dir,
        "fig3_fit.json",
        &serde_json::json!({
            "p": outcome.fit.p,
            "q": outcome.fit.q,
            "sse": outcome.fit.sse,
            "r2": outcome.fit.r2,
            "iterations": outcome.fit.iterations,
            "converged": outcome.fit.converged,
        }),
    )?);

    let script = "set datafile separator ','\n\
        set title 'monopoly adoption: agent model vs fitted closed form'\n\
        set xlabel 't'\n\
        set ylabel 'proportion of adopters'\n\
        set key right bottom\n\
        plot 'fig3_abm.csv' using 1:2 skip 1 with points title 'agent model (ensemble mean)', \\\n\
        \x20    'fig3_model.csv' using 1:2 skip 1 with lines title 'fitted closed form'\n";
    artifacts.push(write_text(dir, "fig3.gp", script)?);

    if !outcome.fit.converged {
        bail!("monopoly fit did not converge");
    }
    Ok(artifacts)
}

/// The four comparison experiments against a duopoly ensemble target.
fn fig4(cfg: &ScenarioConfig, replicates: usize) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let pipe = pipeline::run_pipeline(&cfg.abm, &cfg.fit, cfg.rng_seed, replicates)?;
    let target = pipe.target.mean_curve();
    let mut artifacts = vec![
        write_json(dir, "fig4_calibration.json", &crate::output::calibration_report(&pipe))?,
        write_trajectory_csv(dir, "fig4_target.csv", &target)?,
    ];

    let mut all_converged = true;
    for exp in &pipe.experiments {
        let report = format!("fig4_exp{}.json", exp.experiment);
        artifacts.push(write_json(dir, &report, &fit_report(exp.experiment, &exp.fit))?);
        let curve = model_curve(&exp.fit.params, &target, DEFAULT_DT)
            .context("model curve regeneration failed")?;
        let name = format!("fig4_exp{}.csv", exp.experiment);
        artifacts.push(write_trajectory_csv(dir, &name, &curve)?);
        all_converged &= exp.fit.converged;
    }

    let mut script = String::from(
        "set datafile separator ','\n\
         set xlabel 't'\n\
         set ylabel 'proportion of adopters'\n\
         set key right bottom\n\
         set multiplot layout 2,2\n",
    );
    for exp in &pipe.experiments {
        script.push_str(&format!(
            "set title 'experiment {i}'\n\
             plot 'fig4_target.csv' using 1:2 skip 1 with points title 'target n1', \\\n\
             \x20    'fig4_target.csv' using 1:3 skip 1 with points title 'target n2', \\\n\
             \x20    'fig4_exp{i}.csv' using 1:2 skip 1 with lines title 'model n1', \\\n\
             \x20    'fig4_exp{i}.csv' using 1:3 skip 1 with lines title 'model n2'\n",
            i = exp.experiment,
        ));
    }
    script.push_str("unset multiplot\n");
    artifacts.push(write_text(dir, "fig4.gp", &script)?);

    if !all_converged {
        bail!("at least one experiment did not converge");
    }
    Ok(artifacts)
}

/// Equilibrium proportions: calibrated duopoly without cross terms, the
/// agent-model final split, and the tied cross value that reconciles them.
fn table_eq(cfg: &ScenarioConfig, replicates: usize) -> Result<Vec<PathBuf>> {
    let dir = &cfg.output_dir;
    let m1 = pipeline::monopoly(1, &cfg.abm, cfg.rng_seed, replicates, cfg.fit.monopoly_max_evals)?;
    let m2 = pipeline::monopoly(
        2,
        &cfg.abm,
        cfg.rng_seed + 10_000,
        replicates,
        cfg.fit.monopoly_max_evals,
    )?;
    let base = BassParams::within_brand(m1.fit.p, m1.fit.q, m2.fit.p, m2.fit.q);

    // (a) calibrated parameters, no cross influence
    let final_a = final_split(&base)?;
    let root = solve_within_brand_equilibrium(base.p1, base.p2, base.q11, base.q22)?;

    // agent-model duopoly final proportions (normalized onto the line)
    let duopoly_config = cfg.abm.to_config(cfg.rng_seed + 20_000)?;
    let ens = duopoly_core::abm::ensemble(&duopoly_config, replicates)?;
    let last = ens.samples().last().unwrap();
    let abm_n1 = last.n1 / (last.n1 + last.n2);
    let target_eq = EquilibriumPoint::from_n1(abm_n1)?;

    // (b) tied cross terms reproducing the agent-model split
    let c = match_final_proportions(&base, &target_eq)?;
    let final_b = final_split(&base.with_cross(c, c))?;

    let artifacts = vec![write_json(
        dir,
        "table_eq.json",
        &serde_json::json!({
            "base_params": {
                "p1": base.p1, "q11": base.q11, "p2": base.p2, "q22": base.q22,
            },
            "case_a": { "n1": final_a.0, "n2": final_a.1, "solver_n1": root.n1 },
            "abm_final": { "n1": target_eq.n1, "n2": target_eq.n2 },
            "case_b": { "tied_cross": c, "n1": final_b.0, "n2": final_b.1 },
        }),
    )?];

    if !(m1.fit.converged && m2.fit.converged) {
        bail!("a monopoly fit did not converge");
    }
    Ok(artifacts)
}

fn final_split(params: &BassParams) -> Result<(f64, f64)> {
    let (traj, _) =
        integrate_to_saturation(params, &MarketState::ORIGIN, DEFAULT_DT, 1e-7, 5000.0)?;
    let f = traj.final_state();
    let total = f.total();
    Ok((f.n1 / total, f.n2 / total))
}
