//! Artifact writers: CSV (full double precision, LF, UTF-8), JSON reports,
//! gnuplot scripts.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use duopoly_core::bass::MarketState;
use duopoly_core::fitting::FitResult;

/// 17 significant digits: round-trips every f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

pub fn write_text(dir: &Path, name: &str, content: &str) -> Result<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, content).with_context(|| format!("cannot write {}", path.display()))?;
    log::info!("wrote {}", path.display());
    Ok(path)
}

/// One CSV from a header and pre-formatted cell rows.
pub fn write_csv(dir: &Path, name: &str, header: &str, rows: &[Vec<String>]) -> Result<PathBuf> {
    let mut out = String::with_capacity(rows.len() * 64 + header.len() + 1);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    write_text(dir, name, &out)
}

pub fn trajectory_rows(samples: &[MarketState]) -> Vec<Vec<String>> {
    samples
        .iter()
        .map(|s| vec![fmt_f64(s.t), fmt_f64(s.n1), fmt_f64(s.n2)])
        .collect()
}

pub fn write_trajectory_csv(dir: &Path, name: &str, samples: &[MarketState]) -> Result<PathBuf> {
    write_csv(dir, name, "t,n1,n2", &trajectory_rows(samples))
}

pub fn write_json(dir: &Path, name: &str, value: &serde_json::Value) -> Result<PathBuf> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(dir, name, &text)
}

pub fn fit_report(experiment: u8, fit: &FitResult) -> serde_json::Value {
    serde_json::json!({
        "experiment": experiment,
        "params": {
            "p1": fit.params.p1,
            "p2": fit.params.p2,
            "q11": fit.params.q11,
            "q22": fit.params.q22,
            "q12": fit.params.q12,
            "q21": fit.params.q21,
        },
        "sse": fit.sse,
        "r2": [fit.r2[0], fit.r2[1]],
        "area_diff_pct": fit.area_diff_pct,
        "iterations": fit.iterations,
        "converged": fit.converged,
    })
}

/// Calibration summary shared by `fit` and the experiment bundles.
pub fn calibration_report(pipe: &crate::pipeline::ExperimentPipeline) -> serde_json::Value {
    let mono = |m: &crate::pipeline::MonopolyOutcome| {
        serde_json::json!({
            "p": m.fit.p,
            "q": m.fit.q,
            "sse": m.fit.sse,
            "r2": m.fit.r2,
            "converged": m.fit.converged,
        })
    };
    serde_json::json!({
        "monopoly_brand1": mono(&pipe.monopoly1),
        "monopoly_brand2": mono(&pipe.monopoly2),
        "base_params": {
            "p1": pipe.base.p1,
            "q11": pipe.base.q11,
            "p2": pipe.base.p2,
            "q22": pipe.base.q22,
        },
        "duopoly": {
            "n_agents": pipe.duopoly_config.n_agents,
            "k": pipe.duopoly_config.k,
            "p_rewire": pipe.duopoly_config.p_rewire,
            "gamma1": pipe.duopoly_config.gamma1,
            "gamma2": pipe.duopoly_config.gamma2,
            "rng_seed": pipe.duopoly_config.rng_seed,
        },
    })
}
