//! Monte-Carlo campaigns.
//!
//! A campaign is a list of independent trials. Trial `g` draws everything it
//! needs (channel, active placement, pilot noise, random-baseline coefficients)
//! from `derive_seed(master_seed, g)`, trials run on a rayon pool, and results
//! are merged back in trial order, so the output does not depend on the worker
//! count. A trial that fails produces flagged rows instead of aborting the run.

use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};

use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::{nmse, nmse_rows, rank_trial, unit_power_model};
use crate::channel::{extract_rows, large_scale_coefficient, sample_channels, ChannelMatrix};
use crate::estimators::{
    build_upa_dictionary, estimate_omp_baseline, estimate_proposed, estimate_random_baseline, plan_selection,
    select_active, Estimate, PlacementPolicy,
};
use crate::geometry::{CorrelationModel, RisGeometry};
use crate::rng::{derive_seed, seeded};
use crate::training::{generate_pilots, ls_estimate, simulate_reception, PilotMatrix, TrainingConfig};
use crate::{CMatrix, Error, Result};

use super::ExperimentConfig;

/// Baselines named in the reference experiments that this crate does not implement.
pub const NOT_IMPLEMENTED_BASELINES: &[&str] = &["esprit-music"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    NmseVsActive,
    NmseVsPower,
    RankCdf,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::NmseVsActive => "nmse-vs-active",
            Experiment::NmseVsPower => "nmse-vs-power",
            Experiment::RankCdf => "rank-cdf",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [Experiment::NmseVsActive, Experiment::NmseVsPower, Experiment::RankCdf]
            .into_iter()
            .find(|e| e.name() == name)
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One line of the trials CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub experiment: Experiment,
    pub estimator: String,
    pub l_act: usize,
    pub p_ul_dbm: Option<f64>,
    pub l_total: usize,
    pub m_users: Option<usize>,
    pub trial: u64,
    pub seed: u64,
    /// NMSE, or rank for rank-cdf campaigns. `None` when the trial failed.
    pub value: Option<f64>,
    pub flags: Vec<String>,
}

impl TrialRow {
    /// Value on the experiment's sweep axis.
    pub fn sweep_value(&self) -> f64 {
        match self.experiment {
            Experiment::NmseVsPower => self.p_ul_dbm.unwrap_or(f64::NAN),
            Experiment::NmseVsActive | Experiment::RankCdf => self.l_act as f64,
        }
    }
}

/// One line of the aggregate CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct AggRow {
    pub experiment: Experiment,
    pub estimator: String,
    pub sweep_value: f64,
    pub mean: f64,
    /// Sample standard deviation over `sqrt(n)`; NaN for fewer than two trials.
    pub std_err: f64,
    pub n_trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignResult {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub trials: Vec<TrialRow>,
    pub aggregates: Vec<AggRow>,
}

impl CampaignResult {
    pub fn aggregate_for(&self, estimator: &str, sweep_value: f64) -> Option<&AggRow> {
        self.aggregates
            .iter()
            .find(|a| a.estimator == estimator && a.sweep_value == sweep_value)
    }
}

fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Mean and standard error per `(estimator, sweep value)` over successful
/// NMSE trials, in order of first appearance.
pub fn aggregate(rows: &[TrialRow]) -> Vec<AggRow> {
    let mut keys: Vec<(Experiment, String, f64)> = Vec::new();
    for r in rows {
        let key = (r.experiment, r.estimator.clone(), r.sweep_value());
        if !keys.contains(&key) {
            keys.push(key);
        }
    }
    keys.into_iter()
        .filter_map(|(experiment, estimator, sweep_value)| {
            let values: Vec<f64> = rows
                .iter()
                .filter(|r| r.experiment == experiment && r.estimator == estimator && r.sweep_value() == sweep_value)
                .filter_map(|r| r.value)
                .collect();
            if values.is_empty() {
                return None;
            }
            let (mean, std_err) = mean_and_se(&values);
            Some(AggRow {
                experiment,
                estimator,
                sweep_value,
                mean,
                std_err,
                n_trials: values.len(),
            })
        })
        .collect()
}

/// Immutable per-campaign state shared by all trials.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub geometry: RisGeometry,
    pub model: CorrelationModel,
    pub pilots: PilotMatrix,
    pub dictionary: Option<CMatrix>,
    pub m_users: usize,
    pub noise_dbm: f64,
    pub alpha: f64,
    pub omp_sparsity: Vec<usize>,
    pub placement: PlacementPolicy,
}

impl Scenario {
    pub fn from_config(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let geometry = cfg.geometry()?;
        let mu = large_scale_coefficient(&cfg.path_loss())?;
        let model = CorrelationModel::for_geometry(&geometry, mu)?;
        let dictionary = if cfg.omp_sparsity.is_empty() {
            None
        } else {
            let (az, el) = cfg.dictionary_size();
            Some(build_upa_dictionary(&geometry, az, el)?)
        };
        Ok(Self {
            geometry,
            model,
            pilots: generate_pilots(cfg.m_users)?,
            dictionary,
            m_users: cfg.m_users,
            noise_dbm: cfg.noise_dbm,
            alpha: cfg.alpha,
            omp_sparsity: cfg.omp_sparsity.clone(),
            placement: cfg.placement,
        })
    }

    /// Estimator labels in the order their rows are emitted.
    pub fn estimator_labels(&self) -> Vec<String> {
        let mut labels = vec!["proposed".to_string(), "random_coeff".to_string()];
        labels.extend(self.omp_sparsity.iter().map(|p| format!("omp_p{p}")));
        labels
    }
}

/// Result of one estimator within a trial.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutcome {
    pub label: String,
    pub nmse: f64,
    /// NMSE over the active rows only.
    pub nmse_active: f64,
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub truth: ChannelMatrix,
    pub active: Vec<usize>,
    pub estimators: Vec<std::result::Result<EstimatorOutcome, String>>,
}

fn score(label: &str, truth: &ChannelMatrix, active_rows: &[usize], est: Estimate) -> Result<EstimatorOutcome> {
    let full = nmse(truth, &est.channel)?;
    let act = nmse_rows(truth, &est.channel, active_rows)?;
    let mut flags = est.flags();
    if full.excluded_rows > 0 {
        flags.push(format!("zero_norm_rows={}", full.excluded_rows));
    }
    Ok(EstimatorOutcome {
        label: label.to_string(),
        nmse: full.value,
        nmse_active: act.value,
        flags,
    })
}

/// Runs one NMSE trial: fresh channel, placement, pilot noise and baseline
/// randomness, all drawn from `seed`.
pub fn simulate_trial(scn: &Scenario, l_act: usize, p_ul_dbm: f64, seed: u64) -> Result<TrialOutcome> {
    let mut rng = seeded(seed);
    let total = scn.geometry.num_elements();
    let truth = sample_channels(&scn.model, scn.m_users, &mut rng)?;
    let act = select_active(total, l_act, scn.placement, &mut rng)?;
    let h_act = extract_rows(&truth, &act)?;
    let training = TrainingConfig {
        p_ul_dbm,
        noise_dbm: scn.noise_dbm,
        m_users: scn.m_users,
    };
    let x = simulate_reception(&h_act, &scn.pilots, &training, &mut rng)?;
    let h_tilde = ls_estimate(&x, &scn.pilots, &training)?;
    let active_rows: Vec<usize> = act.indices().iter().map(|&g| g - 1).collect();

    let mut estimators = Vec::new();
    let proposed = plan_selection(scn.model.correlation(), &act, scn.m_users, scn.alpha)
        .and_then(|plan| estimate_proposed(&h_tilde, &plan, &act, total))
        .and_then(|e| score("proposed", &truth, &active_rows, e));
    estimators.push(proposed.map_err(|e| e.to_string()));

    let random = estimate_random_baseline(&h_tilde, &act, total, &mut rng)
        .and_then(|e| score("random_coeff", &truth, &active_rows, e));
    estimators.push(random.map_err(|e| e.to_string()));

    if let Some(dict) = &scn.dictionary {
        for &p in &scn.omp_sparsity {
            let label = format!("omp_p{p}");
            let omp = estimate_omp_baseline(&h_tilde, &act, dict, p).and_then(|e| score(&label, &truth, &active_rows, e));
            estimators.push(omp.map_err(|e| e.to_string()));
        }
    }

    Ok(TrialOutcome {
        truth,
        active: act.indices().to_vec(),
        estimators,
    })
}

fn error_flag(msg: &str) -> String {
    format!("error={msg}")
}

fn nmse_trial_rows(
    scn: &Scenario,
    cfg: &ExperimentConfig,
    experiment: Experiment,
    l_act: usize,
    p_ul_dbm: f64,
    trial: u64,
) -> Vec<TrialRow> {
    let seed = derive_seed(cfg.master_seed, trial);
    let base = |estimator: String, value: Option<f64>, flags: Vec<String>| TrialRow {
        experiment,
        estimator,
        l_act,
        p_ul_dbm: Some(p_ul_dbm),
        l_total: scn.geometry.num_elements(),
        m_users: Some(scn.m_users),
        trial,
        seed,
        value,
        flags,
    };
    let outcome = catch_unwind(AssertUnwindSafe(|| simulate_trial(scn, l_act, p_ul_dbm, seed)))
        .unwrap_or_else(|_| Err(Error::Numerical("trial panicked".into())));
    match outcome {
        Ok(o) => scn
            .estimator_labels()
            .into_iter()
            .zip(o.estimators)
            .map(|(label, r)| match r {
                Ok(e) => base(label, Some(e.nmse), e.flags),
                Err(msg) => base(label, None, vec![error_flag(&msg)]),
            })
            .collect(),
        Err(e) => scn
            .estimator_labels()
            .into_iter()
            .map(|label| base(label, None, vec![error_flag(&e.to_string())]))
            .collect(),
    }
}

fn run_parallel<T, F>(workers: usize, n: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| (0..n as u64).into_par_iter().map(&f).collect()))
}

fn run_nmse_sweep(cfg: &ExperimentConfig, experiment: Experiment, points: Vec<(usize, f64)>) -> Result<CampaignResult> {
    cfg.validate_for(experiment)?;
    let scn = Scenario::from_config(cfg)?;
    let per_point = cfg.trials;
    let rows: Vec<Vec<TrialRow>> = run_parallel(cfg.workers, points.len() * per_point, |g| {
        let (l_act, p) = points[g as usize / per_point];
        nmse_trial_rows(&scn, cfg, experiment, l_act, p, g)
    })?;
    let trials: Vec<TrialRow> = rows.into_iter().flatten().collect();
    Ok(CampaignResult {
        experiment,
        config: cfg.clone(),
        aggregates: aggregate(&trials),
        trials,
    })
}

/// NMSE versus number of active elements at fixed pilot power `cfg.p_ul_dbm`.
pub fn run_nmse_vs_active(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    let points = cfg.l_act_list.iter().map(|&a| (a, cfg.p_ul_dbm)).collect();
    run_nmse_sweep(cfg, Experiment::NmseVsActive, points)
}

/// NMSE versus pilot power at fixed `cfg.l_act`.
pub fn run_nmse_vs_power(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    let points = cfg.p_ul_dbm_list.iter().map(|&p| (cfg.l_act, p)).collect();
    run_nmse_sweep(cfg, Experiment::NmseVsPower, points)
}

/// Rank CDF of `K_act^{1/2}` with `A·μ = 1` for every `rank_grid` case.
///
/// Placement `t` of case `c` is trial `c·rank_placements + t`. The aggregate
/// rows carry the empirical CDF: estimator `rank_cdf_<L_act>_of_<L>`, sweep
/// value `r`, mean `P(rank ≤ r)`.
pub fn run_rank_cdf(cfg: &ExperimentConfig) -> Result<CampaignResult> {
    let experiment = Experiment::RankCdf;
    cfg.validate_for(experiment)?;
    let n = cfg.rank_placements;
    let mut trials = Vec::new();
    let mut aggregates = Vec::new();
    for (c, &[l_act, l_h, l_v]) in cfg.rank_grid.iter().enumerate() {
        let model = unit_power_model(&cfg.geometry_for(l_h, l_v)?)?;
        let total = l_h * l_v;
        let rows = run_parallel(cfg.workers, n, |t| {
            let trial = (c * n) as u64 + t;
            let seed = derive_seed(cfg.master_seed, trial);
            let result = catch_unwind(AssertUnwindSafe(|| rank_trial(&model, l_act, seed, cfg.rank_rel_tol)))
                .unwrap_or_else(|_| Err(Error::Numerical("trial panicked".into())));
            let (value, flags) = match result {
                Ok(s) => (Some(s.rank as f64), Vec::new()),
                Err(e) => (None, vec![error_flag(&e.to_string())]),
            };
            TrialRow {
                experiment,
                estimator: "k_act_sqrt_rank".into(),
                l_act,
                p_ul_dbm: None,
                l_total: total,
                m_users: None,
                trial,
                seed,
                value,
                flags,
            }
        })?;
        let ranks: Vec<usize> = rows.iter().filter_map(|r| r.value).map(|v| v as usize).collect();
        let label = format!("rank_cdf_{l_act}_of_{total}");
        for r in 0..=l_act {
            let indicators: Vec<f64> = ranks.iter().map(|&k| if k <= r { 1.0 } else { 0.0 }).collect();
            if indicators.is_empty() {
                break;
            }
            let (mean, std_err) = mean_and_se(&indicators);
            aggregates.push(AggRow {
                experiment,
                estimator: label.clone(),
                sweep_value: r as f64,
                mean,
                std_err,
                n_trials: indicators.len(),
            });
        }
        trials.extend(rows);
    }
    Ok(CampaignResult {
        experiment,
        config: cfg.clone(),
        trials,
        aggregates,
    })
}

pub fn run_experiment(cfg: &ExperimentConfig, experiment: Experiment) -> Result<CampaignResult> {
    match experiment {
        Experiment::NmseVsActive => run_nmse_vs_active(cfg),
        Experiment::NmseVsPower => run_nmse_vs_power(cfg),
        Experiment::RankCdf => run_rank_cdf(cfg),
    }
}
