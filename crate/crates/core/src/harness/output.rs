//! CSV and metadata files for a finished campaign.
//!
//! `<name>_trials.csv`: experiment, estimator, l_act, p_ul_dbm, l_total,
//! m_users, trial, seed, nmse (rank for rank-cdf), flags.
//!
//! `<name>_agg.csv`: experiment, estimator, sweep_value, mean, std_err, n_trials.
//!
//! `<name>_meta.toml`: the resolved configuration plus run metadata.
//!
//! Fields that do not apply (pilot power and UE count for rank-cdf, the value
//! of a failed trial) are left empty. Multiple flags are joined with `;`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::{Error, Result};

use super::campaign::NOT_IMPLEMENTED_BASELINES;
use super::{CampaignResult, Experiment, ExperimentConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignFiles {
    pub trials: PathBuf,
    pub aggregates: PathBuf,
    pub meta: PathBuf,
}

#[derive(Serialize)]
struct Meta<'a> {
    experiment: Experiment,
    master_seed: u64,
    code_version: String,
    workers: usize,
    not_implemented_baselines: &'a [&'a str],
    config: &'a ExperimentConfig,
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e))
}

/// Writes the three campaign files into `dir`, creating it if needed.
pub fn write_csv(result: &CampaignResult, dir: impl AsRef<Path>) -> Result<CampaignFiles> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let name = result.experiment.name();
    let files = CampaignFiles {
        trials: dir.join(format!("{name}_trials.csv")),
        aggregates: dir.join(format!("{name}_agg.csv")),
        meta: dir.join(format!("{name}_meta.toml")),
    };

    let value_col = match result.experiment {
        Experiment::RankCdf => "rank",
        _ => "nmse",
    };
    let path = &files.trials;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record([
        "experiment",
        "estimator",
        "l_act",
        "p_ul_dbm",
        "l_total",
        "m_users",
        "trial",
        "seed",
        value_col,
        "flags",
    ])
    .map_err(|e| csv_err(path, e))?;
    for r in &result.trials {
        w.write_record([
            r.experiment.name().to_string(),
            r.estimator.clone(),
            r.l_act.to_string(),
            opt(r.p_ul_dbm),
            r.l_total.to_string(),
            opt(r.m_users),
            r.trial.to_string(),
            r.seed.to_string(),
            opt(r.value),
            r.flags.join(";"),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let path = &files.aggregates;
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_err(path, e))?;
    w.write_record(["experiment", "estimator", "sweep_value", "mean", "std_err", "n_trials"])
        .map_err(|e| csv_err(path, e))?;
    for a in &result.aggregates {
        w.write_record([
            a.experiment.name().to_string(),
            a.estimator.clone(),
            a.sweep_value.to_string(),
            a.mean.to_string(),
            a.std_err.to_string(),
            a.n_trials.to_string(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;

    let meta = Meta {
        experiment: result.experiment,
        master_seed: result.config.master_seed,
        code_version: format!("{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")),
        workers: result.config.workers,
        not_implemented_baselines: NOT_IMPLEMENTED_BASELINES,
        config: &result.config,
    };
    let text = toml::to_string(&meta).map_err(|e| Error::config(e.to_string()))?;
    std::fs::write(&files.meta, text).map_err(|e| Error::io(&files.meta, e))?;
    Ok(files)
}
