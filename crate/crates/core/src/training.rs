//! Uplink pilot training at the active elements and the LS sub-channel estimate.
//!
//! UE `m` sends column `m` of an orthonormal `τ_p x M` pilot matrix `Φ` with
//! `τ_p = M`. Stacking the slots received by the active elements gives
//! `X = √P_UL·H_act·Φᵀ + N`, and projecting onto `Φ*` yields
//! `H̃_act = X·Φ*/√P_UL = H_act + N·Φ*/√P_UL`.

use std::f64::consts::PI;

use rand::Rng;

use crate::channel::ChannelMatrix;
use crate::rng::complex_gaussian_matrix;
use crate::{CMatrix, Error, Result, C64};

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Orthonormal pilot sequences, one column per UE.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotMatrix {
    phi: CMatrix,
}

impl PilotMatrix {
    pub fn phi(&self) -> &CMatrix {
        &self.phi
    }

    /// Sequence length `τ_p`.
    pub fn length(&self) -> usize {
        self.phi.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.phi.ncols()
    }
}

/// Unitary DFT pilots: `Φ[t, m] = exp(-j2π·t·m/M)/√M`.
pub fn generate_pilots(m_users: usize) -> Result<PilotMatrix> {
    if m_users == 0 {
        return Err(Error::argument("at least one UE is required"));
    }
    let scale = 1.0 / (m_users as f64).sqrt();
    let phi = CMatrix::from_fn(m_users, m_users, |t, m| {
        // reduce the exponent first so the angle stays in [0, 2π)
        let k = (t * m) % m_users;
        C64::from_polar(scale, -2.0 * PI * k as f64 / m_users as f64)
    });
    Ok(PilotMatrix { phi })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainingConfig {
    /// Uplink pilot power per UE, dBm.
    pub p_ul_dbm: f64,
    /// Noise variance at each active element, dBm. `-inf` means noiseless.
    pub noise_dbm: f64,
    pub m_users: usize,
}

impl TrainingConfig {
    pub fn pilot_power_watts(&self) -> f64 {
        dbm_to_watts(self.p_ul_dbm)
    }

    pub fn noise_watts(&self) -> f64 {
        dbm_to_watts(self.noise_dbm)
    }

    fn validate(&self) -> Result<()> {
        if self.m_users == 0 {
            return Err(Error::argument("at least one UE is required"));
        }
        if !self.p_ul_dbm.is_finite() {
            return Err(Error::argument(format!("pilot power must be finite, got {} dBm", self.p_ul_dbm)));
        }
        if self.noise_dbm.is_nan() || self.noise_dbm == f64::INFINITY {
            return Err(Error::argument(format!("invalid noise power {} dBm", self.noise_dbm)));
        }
        Ok(())
    }
}

/// Stacked pilot observations `X` (`L_act x τ_p`) at the active elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ReceivedPilots {
    signal: CMatrix,
    rows: Vec<usize>,
}

impl ReceivedPilots {
    pub fn new(signal: CMatrix, rows: Vec<usize>) -> Result<Self> {
        if signal.nrows() != rows.len() {
            return Err(Error::argument("one row index per received row is required"));
        }
        Ok(Self { signal, rows })
    }

    pub fn signal(&self) -> &CMatrix {
        &self.signal
    }

    /// 1-based element index of each received row.
    pub fn row_indices(&self) -> &[usize] {
        &self.rows
    }

    /// Observation in slot `t` (column `t` of `X`).
    pub fn slot(&self, t: usize) -> CMatrix {
        self.signal.columns(t, 1).into_owned()
    }
}

/// Simulates `X = √P_UL·H_act·Φᵀ + N` with `N` i.i.d. CN(0, σ²).
pub fn simulate_reception<R: Rng + ?Sized>(
    h_act: &ChannelMatrix,
    pilots: &PilotMatrix,
    cfg: &TrainingConfig,
    rng: &mut R,
) -> Result<ReceivedPilots> {
    cfg.validate()?;
    check_dims(h_act.num_users(), pilots, cfg)?;
    let amp = cfg.pilot_power_watts().sqrt();
    let sigma = cfg.noise_watts().sqrt();
    let signal = h_act.entries() * pilots.phi().transpose() * C64::from(amp);
    let noise = complex_gaussian_matrix(rng, h_act.num_rows(), pilots.length()) * C64::from(sigma);
    ReceivedPilots::new(signal + noise, h_act.row_indices().to_vec())
}

/// LS estimate `H̃_act = X·Φ*/√P_UL`.
pub fn ls_estimate(x: &ReceivedPilots, pilots: &PilotMatrix, cfg: &TrainingConfig) -> Result<ChannelMatrix> {
    cfg.validate()?;
    if x.signal.ncols() != pilots.length() {
        return Err(Error::argument(format!(
            "received {} slots but pilots have length {}",
            x.signal.ncols(),
            pilots.length()
        )));
    }
    check_dims(pilots.num_users(), pilots, cfg)?;
    let inv_amp = 1.0 / cfg.pilot_power_watts().sqrt();
    let est = &x.signal * pilots.phi().conjugate() * C64::from(inv_amp);
    ChannelMatrix::with_rows(est, x.rows.clone())
}

fn check_dims(users: usize, pilots: &PilotMatrix, cfg: &TrainingConfig) -> Result<()> {
    if users != pilots.num_users() || users != cfg.m_users {
        return Err(Error::argument(format!(
            "UE count mismatch: channel {users}, pilots {}, config {}",
            pilots.num_users(),
            cfg.m_users
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn orthonormality_error(p: &PilotMatrix) -> f64 {
        let g = p.phi().transpose() * p.phi().conjugate();
        (g - CMatrix::identity(p.num_users(), p.num_users())).camax()
    }

    #[test]
    fn dbm_conversion() {
        assert_eq!(dbm_to_watts(30.0), 1.0);
        assert!((dbm_to_watts(0.0) - 1e-3).abs() < 1e-18);
        let w = dbm_to_watts(-114.0);
        assert!((w - 3.981_071_705_534_973e-15).abs() / w < 1e-12);
        assert_eq!(dbm_to_watts(f64::NEG_INFINITY), 0.0);
    }

    #[test]
    fn small_pilot_matrices() {
        let p = generate_pilots(1).unwrap();
        assert_eq!(p.phi(), &CMatrix::from_element(1, 1, C64::new(1.0, 0.0)));

        let p = generate_pilots(2).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = CMatrix::from_row_slice(2, 2, &[h, h, h, -h].map(C64::from));
        assert!((p.phi() - expected).camax() < 1e-15);
        assert!(orthonormality_error(&p) <= 1e-12);
        assert!(generate_pilots(0).is_err());
    }

    #[test]
    fn pilots_orthonormal_up_to_64() {
        for m in 1..=64 {
            let p = generate_pilots(m).unwrap();
            assert_eq!(p.length(), m);
            assert!(orthonormality_error(&p) <= 1e-12, "M = {m}");
        }
    }

    fn channel(rows: usize, m: usize, seed: u64) -> ChannelMatrix {
        let e = complex_gaussian_matrix(&mut seeded(seed), rows, m);
        ChannelMatrix::with_rows(e, (1..=rows).map(|k| 3 * k).collect()).unwrap()
    }

    #[test]
    fn noiseless_reception_and_recovery() {
        let h = channel(5, 4, 1);
        let p = generate_pilots(4).unwrap();
        let cfg = TrainingConfig {
            p_ul_dbm: 30.0,
            noise_dbm: f64::NEG_INFINITY,
            m_users: 4,
        };
        let x = simulate_reception(&h, &p, &cfg, &mut seeded(2)).unwrap();
        assert_eq!(x.signal(), &(h.entries() * p.phi().transpose()));
        assert_eq!(x.slot(1), x.signal().columns(1, 1).into_owned());

        let est = ls_estimate(&x, &p, &cfg).unwrap();
        let err = (est.entries() - h.entries()).norm() / h.entries().norm();
        assert!(err <= 1e-10);
        assert_eq!(est.row_indices(), h.row_indices());
    }

    #[test]
    fn power_scaling_doubles_signal() {
        let h = channel(3, 2, 4);
        let p = generate_pilots(2).unwrap();
        let quiet = |dbm| TrainingConfig {
            p_ul_dbm: dbm,
            noise_dbm: f64::NEG_INFINITY,
            m_users: 2,
        };
        let x1 = simulate_reception(&h, &p, &quiet(10.0), &mut seeded(1)).unwrap();
        let x4 = simulate_reception(&h, &p, &quiet(10.0 + 10.0 * 4f64.log10()), &mut seeded(1)).unwrap();
        let diff = (x4.signal() - x1.signal() * C64::from(2.0)).camax();
        assert!(diff <= 1e-12 * x1.signal().camax());
    }

    #[test]
    fn pure_noise_variance() {
        let rows = 64;
        let m = 8;
        let zero = ChannelMatrix::with_rows(CMatrix::zeros(rows, m), (1..=rows).collect()).unwrap();
        let p = generate_pilots(m).unwrap();
        let cfg = TrainingConfig {
            p_ul_dbm: 10.0,
            noise_dbm: -114.0,
            m_users: m,
        };
        let sigma2 = cfg.noise_watts();
        let mut rng = seeded(9);
        let (mut rx_pow, mut est_pow, mut n) = (0.0, 0.0, 0usize);
        while n < 100_000 {
            let x = simulate_reception(&zero, &p, &cfg, &mut rng).unwrap();
            let est = ls_estimate(&x, &p, &cfg).unwrap();
            rx_pow += x.signal().norm_squared();
            est_pow += est.entries().norm_squared();
            n += rows * m;
        }
        let rx_var = rx_pow / n as f64;
        let est_var = est_pow / n as f64;
        assert!((rx_var / sigma2 - 1.0).abs() < 0.05, "{rx_var} vs {sigma2}");
        let target = sigma2 / cfg.pilot_power_watts();
        assert!((est_var / target - 1.0).abs() < 0.05, "{est_var} vs {target}");
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let h = channel(3, 2, 4);
        let p = generate_pilots(3).unwrap();
        let cfg = TrainingConfig {
            p_ul_dbm: 0.0,
            noise_dbm: -100.0,
            m_users: 2,
        };
        assert!(simulate_reception(&h, &p, &cfg, &mut seeded(0)).is_err());
    }
}
