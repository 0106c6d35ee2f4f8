//! Flat key-value (TOML) experiment configuration.
//!
//! Every key is optional; missing keys take the reference scenario values
//! (16x16 surface at λ/8 spacing, 3.5 GHz, 8 UEs at 20 m, -114 dBm noise,
//! α = 5). Unknown keys are rejected.
//!
//! ```toml
//! l_h = 16
//! l_v = 16
//! d_h_wavelengths = 0.125
//! d_v_wavelengths = 0.125
//! carrier_ghz = 3.5
//! m_users = 8
//! ref_loss_db = 30.0
//! path_loss_exponent = 2.2
//! distance_m = 20.0
//! noise_dbm = -114.0          # -inf for noiseless training
//! alpha = 5.0
//! omp_sparsity = [10, 20]
//! # dict_az = 32              # default 2·l_h
//! # dict_el = 32              # default 2·l_v
//! placement = "random"        # or "uniform-grid"
//! l_act_list = [8, 16, 32, 64]   # nmse-vs-active sweep
//! p_ul_dbm = 10.0                # fixed power for nmse-vs-active
//! p_ul_dbm_list = [0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0]  # nmse-vs-power sweep
//! l_act = 16                     # fixed L_act for nmse-vs-power
//! rank_grid = [[8, 8, 8], [16, 16, 16]]   # [l_act, l_h, l_v] per rank-cdf case
//! rank_placements = 1000
//! # rank_rel_tol = 1e-10         # default 1e3·max(dim)·ε
//! trials = 500
//! master_seed = 1
//! out_dir = "results"
//! workers = 0                    # 0 = one per core
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::PathLossParams;
use crate::estimators::PlacementPolicy;
use crate::geometry::RisGeometry;
use crate::{Error, Result};

use super::Experiment;

const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub l_h: usize,
    pub l_v: usize,
    pub d_h_wavelengths: f64,
    pub d_v_wavelengths: f64,
    pub carrier_ghz: f64,
    pub m_users: usize,
    pub ref_loss_db: f64,
    pub path_loss_exponent: f64,
    pub distance_m: f64,
    pub noise_dbm: f64,
    pub alpha: f64,
    pub omp_sparsity: Vec<usize>,
    pub dict_az: Option<usize>,
    pub dict_el: Option<usize>,
    pub placement: PlacementPolicy,
    pub l_act_list: Vec<usize>,
    pub p_ul_dbm: f64,
    pub p_ul_dbm_list: Vec<f64>,
    pub l_act: usize,
    pub rank_grid: Vec<[usize; 3]>,
    pub rank_placements: usize,
    pub rank_rel_tol: Option<f64>,
    pub trials: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    pub workers: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            l_h: 16,
            l_v: 16,
            d_h_wavelengths: 0.125,
            d_v_wavelengths: 0.125,
            carrier_ghz: 3.5,
            m_users: 8,
            ref_loss_db: 30.0,
            path_loss_exponent: 2.2,
            distance_m: 20.0,
            noise_dbm: -114.0,
            alpha: 5.0,
            omp_sparsity: vec![10, 20],
            dict_az: None,
            dict_el: None,
            placement: PlacementPolicy::Random,
            l_act_list: vec![8, 16, 32, 64],
            p_ul_dbm: 10.0,
            p_ul_dbm_list: vec![0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0],
            l_act: 16,
            rank_grid: vec![
                [4, 4, 4],
                [8, 8, 8],
                [8, 16, 16],
                [16, 16, 16],
                [32, 16, 16],
                [128, 16, 16],
                [192, 16, 16],
            ],
            rank_placements: 1000,
            rank_rel_tol: None,
            trials: 500,
            master_seed: 1,
            out_dir: PathBuf::from("results"),
            workers: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config(e.to_string()))
    }

    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / (self.carrier_ghz * 1e9)
    }

    pub fn geometry(&self) -> Result<RisGeometry> {
        self.geometry_for(self.l_h, self.l_v)
    }

    pub(crate) fn geometry_for(&self, l_h: usize, l_v: usize) -> Result<RisGeometry> {
        RisGeometry::with_spacing_in_wavelengths(
            l_h,
            l_v,
            self.d_h_wavelengths,
            self.d_v_wavelengths,
            self.wavelength_m(),
        )
    }

    pub fn path_loss(&self) -> PathLossParams {
        PathLossParams {
            ref_loss_db: self.ref_loss_db,
            exponent: self.path_loss_exponent,
            distance_m: self.distance_m,
        }
    }

    pub fn num_elements(&self) -> usize {
        self.l_h * self.l_v
    }

    pub fn dictionary_size(&self) -> (usize, usize) {
        (self.dict_az.unwrap_or(2 * self.l_h), self.dict_el.unwrap_or(2 * self.l_v))
    }

    /// Checks the settings shared by every experiment.
    pub fn validate(&self) -> Result<()> {
        self.geometry()?;
        if !(self.carrier_ghz.is_finite() && self.carrier_ghz > 0.0) {
            return Err(Error::config("carrier_ghz must be positive"));
        }
        if self.m_users == 0 {
            return Err(Error::config("m_users must be at least 1"));
        }
        crate::channel::large_scale_coefficient(&self.path_loss()).map_err(|e| Error::config(e.to_string()))?;
        if self.noise_dbm.is_nan() || self.noise_dbm == f64::INFINITY {
            return Err(Error::config("noise_dbm must be finite or -inf"));
        }
        if !self.alpha.is_finite() {
            return Err(Error::config("alpha must be finite"));
        }
        if self.omp_sparsity.contains(&0) {
            return Err(Error::config("omp_sparsity entries must be at least 1"));
        }
        if self.dict_az == Some(0) || self.dict_el == Some(0) {
            return Err(Error::config("dictionary grid sizes must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        if self.rank_placements == 0 {
            return Err(Error::config("rank_placements must be at least 1"));
        }
        if let Some(t) = self.rank_rel_tol {
            if !(t.is_finite() && t >= 0.0) {
                return Err(Error::config("rank_rel_tol must be a nonnegative number"));
            }
        }
        // seeds are echoed into TOML metadata, whose integers are signed 64-bit
        if self.master_seed > i64::MAX as u64 {
            return Err(Error::config(format!("master_seed must be at most {}", i64::MAX)));
        }
        Ok(())
    }

    /// Checks the shared settings plus the sweep used by `experiment`.
    pub fn validate_for(&self, experiment: Experiment) -> Result<()> {
        self.validate()?;
        let l = self.num_elements();
        let check_l_act = |l_act: usize| -> Result<()> {
            if l_act < self.m_users || l_act > l {
                return Err(Error::config(format!(
                    "active element count {l_act} must lie in {}..={l} (m_users..=L)",
                    self.m_users
                )));
            }
            Ok(())
        };
        match experiment {
            Experiment::NmseVsActive => {
                if self.l_act_list.is_empty() {
                    return Err(Error::config("l_act_list must not be empty"));
                }
                self.l_act_list.iter().try_for_each(|&a| check_l_act(a))?;
                if !self.p_ul_dbm.is_finite() {
                    return Err(Error::config("p_ul_dbm must be finite"));
                }
            }
            Experiment::NmseVsPower => {
                if self.p_ul_dbm_list.is_empty() {
                    return Err(Error::config("p_ul_dbm_list must not be empty"));
                }
                if self.p_ul_dbm_list.iter().any(|p| !p.is_finite()) {
                    return Err(Error::config("p_ul_dbm_list entries must be finite"));
                }
                check_l_act(self.l_act)?;
            }
            Experiment::RankCdf => {
                if self.rank_grid.is_empty() {
                    return Err(Error::config("rank_grid must not be empty"));
                }
                for &[l_act, l_h, l_v] in &self.rank_grid {
                    self.geometry_for(l_h, l_v)?;
                    if l_act == 0 || l_act > l_h * l_v {
                        return Err(Error::config(format!(
                            "rank_grid entry [{l_act}, {l_h}, {l_v}]: l_act must lie in 1..={}",
                            l_h * l_v
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
