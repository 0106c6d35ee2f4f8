//! Experiment configuration, Monte-Carlo campaigns and CSV persistence.

mod campaign;
mod config;
mod output;

pub use campaign::{
    aggregate, run_experiment, run_nmse_vs_active, run_nmse_vs_power, run_rank_cdf, simulate_trial, AggRow,
    CampaignResult, EstimatorOutcome, Experiment, Scenario, TrialOutcome, TrialRow, NOT_IMPLEMENTED_BASELINES,
};
pub use config::ExperimentConfig;
pub use output::{write_csv, CampaignFiles};
