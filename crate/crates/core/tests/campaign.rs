use std::collections::HashMap;

use approx::assert_relative_eq;
use ris_chest::harness::{
    aggregate, run_experiment, run_nmse_vs_active, run_nmse_vs_power, run_rank_cdf, write_csv, Experiment,
    ExperimentConfig,
};

fn small() -> ExperimentConfig {
    ExperimentConfig {
        l_h: 8,
        l_v: 8,
        m_users: 4,
        l_act_list: vec![4, 8, 16],
        l_act: 8,
        p_ul_dbm_list: vec![0.0, 20.0],
        omp_sparsity: vec![4],
        trials: 6,
        rank_grid: vec![[8, 8, 8], [32, 8, 8]],
        rank_placements: 20,
        workers: 1,
        ..Default::default()
    }
}

fn read_rows(path: &std::path::Path) -> Vec<HashMap<String, String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let headers = r.headers().unwrap().clone();
    r.records()
        .map(|rec| headers.iter().zip(rec.unwrap().iter()).map(|(h, v)| (h.to_string(), v.to_string())).collect())
        .collect()
}

#[test]
fn aggregates_match_recomputation_from_trials_csv() {
    let dir = tempfile::tempdir().unwrap();
    let res = run_nmse_vs_active(&small()).unwrap();
    let files = write_csv(&res, dir.path()).unwrap();
    let trials = read_rows(&files.trials);
    let aggs = read_rows(&files.aggregates);
    assert_eq!(trials.len(), 3 * 6 * 3);
    for a in &aggs {
        let vals: Vec<f64> = trials
            .iter()
            .filter(|t| t["estimator"] == a["estimator"] && t["l_act"].parse::<f64>().unwrap() == a["sweep_value"].parse::<f64>().unwrap())
            .filter(|t| !t["nmse"].is_empty())
            .map(|t| t["nmse"].parse().unwrap())
            .collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let se = (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt();
        assert_eq!(a["n_trials"].parse::<usize>().unwrap(), vals.len());
        assert_relative_eq!(a["mean"].parse::<f64>().unwrap(), mean, max_relative = 1e-12);
        assert_relative_eq!(a["std_err"].parse::<f64>().unwrap(), se, max_relative = 1e-12);
    }
}

#[test]
fn omp_sparsity_above_active_count_is_flagged_not_fatal() {
    let cfg = ExperimentConfig {
        omp_sparsity: vec![12],
        ..small()
    };
    let res = run_nmse_vs_active(&cfg).unwrap();
    for r in res.trials.iter().filter(|r| r.estimator == "omp_p12") {
        if r.l_act < 12 {
            assert!(r.value.is_none());
            assert!(r.flags[0].starts_with("error="));
        } else {
            assert!(r.value.is_some());
        }
    }
    assert!(res.aggregate_for("omp_p12", 4.0).is_none());
    assert!(res.aggregate_for("proposed", 4.0).is_some());
}

#[test]
fn noiseless_power_campaign_recovers_active_rows_exactly() {
    let cfg = ExperimentConfig {
        noise_dbm: f64::NEG_INFINITY,
        ..small()
    };
    let scn = ris_chest::harness::Scenario::from_config(&cfg).unwrap();
    let o = ris_chest::harness::simulate_trial(&scn, 8, 10.0, 5).unwrap();
    for e in o.estimators.iter().take(2) {
        let e = e.as_ref().unwrap();
        assert!(e.nmse_active < 1e-28, "{}", e.nmse_active);
        assert!(e.nmse > 0.0);
    }
    let res = run_nmse_vs_power(&cfg).unwrap();
    assert!(res.trials.iter().all(|r| r.value.is_some()));
}

#[test]
fn one_trial_campaign_has_undefined_std_err() {
    let cfg = ExperimentConfig { trials: 1, ..small() };
    let dir = tempfile::tempdir().unwrap();
    let res = run_nmse_vs_power(&cfg).unwrap();
    assert!(res.aggregates.iter().all(|a| a.n_trials == 1 && a.std_err.is_nan()));
    let files = write_csv(&res, dir.path()).unwrap();
    assert_eq!(read_rows(&files.trials).len(), 2 * 3);
    assert!(read_rows(&files.aggregates).iter().all(|a| a["std_err"] == "NaN"));
}

#[test]
fn empty_result_writes_headers_only() {
    let dir = tempfile::tempdir().unwrap();
    let mut res = run_nmse_vs_active(&ExperimentConfig { trials: 1, ..small() }).unwrap();
    res.trials.clear();
    res.aggregates = aggregate(&res.trials);
    let files = write_csv(&res, dir.path()).unwrap();
    let text = std::fs::read_to_string(&files.trials).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("experiment,estimator,l_act,p_ul_dbm,l_total,m_users,trial,seed,nmse,flags"));
    assert_eq!(std::fs::read_to_string(&files.aggregates).unwrap().lines().count(), 1);
}

#[test]
fn rank_cdf_rows_and_cdf_encoding() {
    let dir = tempfile::tempdir().unwrap();
    let res = run_rank_cdf(&small()).unwrap();
    assert_eq!(res.trials.len(), 40);
    assert!(res.trials.iter().all(|r| r.estimator == "k_act_sqrt_rank" && r.p_ul_dbm.is_none()));
    let full = res.aggregate_for("rank_cdf_8_of_64", 8.0).unwrap();
    assert_eq!(full.mean, 1.0);
    let cdf: Vec<f64> = res.aggregates.iter().filter(|a| a.estimator == "rank_cdf_32_of_64").map(|a| a.mean).collect();
    assert_eq!(cdf.len(), 33);
    assert!(cdf.windows(2).all(|w| w[0] <= w[1]));
    let files = write_csv(&res, dir.path()).unwrap();
    let rows = read_rows(&files.trials);
    assert!(rows.iter().all(|r| r["p_ul_dbm"].is_empty() && r["m_users"].is_empty() && !r["rank"].is_empty()));
    let meta: toml::Value = toml::from_str(&std::fs::read_to_string(files.meta).unwrap()).unwrap();
    assert_eq!(meta["experiment"].as_str(), Some("rank-cdf"));
    assert_eq!(meta["not_implemented_baselines"].as_array().unwrap().len(), 1);
}

#[test]
fn seeds_and_worker_counts_do_not_change_results() {
    let a = run_experiment(&small(), Experiment::NmseVsPower).unwrap();
    let b = run_experiment(&ExperimentConfig { workers: 3, ..small() }, Experiment::NmseVsPower).unwrap();
    assert_eq!(a.trials, b.trials);
    let c = run_experiment(&ExperimentConfig { master_seed: 2, ..small() }, Experiment::NmseVsPower).unwrap();
    assert_ne!(a.trials[0].value, c.trials[0].value);
}

#[test]
fn invalid_sweeps_are_rejected() {
    let cases = [
        ExperimentConfig { l_act_list: vec![2], ..small() },
        ExperimentConfig { l_act_list: vec![65], ..small() },
        ExperimentConfig { l_act_list: vec![], ..small() },
    ];
    for cfg in cases {
        assert!(run_nmse_vs_active(&cfg).is_err());
    }
    assert!(run_nmse_vs_power(&ExperimentConfig { p_ul_dbm_list: vec![f64::NAN], ..small() }).is_err());
    assert!(run_rank_cdf(&ExperimentConfig { rank_grid: vec![[70, 8, 8]], ..small() }).is_err());
}
