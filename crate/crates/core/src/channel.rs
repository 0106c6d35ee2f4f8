//! Correlated Rayleigh UE-RIS channels.

use rand::Rng;

use crate::estimators::ActiveSet;
use crate::geometry::CorrelationModel;
use crate::rng::complex_gaussian_matrix;
use crate::{CMatrix, Error, RMatrix, Result, C64};

/// Complex channel coefficients with rows indexed by RIS element and columns by UE.
///
/// `rows[k]` is the 1-based global element index of row `k`, so the same type
/// carries both the full channel and the active-element sub-channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
    rows: Vec<usize>,
}

impl ChannelMatrix {
    /// Full channel whose row `k` belongs to element `k + 1`.
    pub fn full(entries: CMatrix) -> Self {
        let rows = (1..=entries.nrows()).collect();
        Self { entries, rows }
    }

    pub fn with_rows(entries: CMatrix, rows: Vec<usize>) -> Result<Self> {
        if entries.nrows() != rows.len() {
            return Err(Error::argument(format!(
                "{} matrix rows but {} row indices",
                entries.nrows(),
                rows.len()
            )));
        }
        if entries.ncols() == 0 {
            return Err(Error::argument("channel matrix needs at least one UE column"));
        }
        let mut seen = rows.clone();
        seen.sort_unstable();
        if seen.first() == Some(&0) {
            return Err(Error::argument("row indices are 1-based"));
        }
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::argument("duplicate row index"));
        }
        Ok(Self { entries, rows })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    /// 1-based global element index of each row.
    pub fn row_indices(&self) -> &[usize] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn num_users(&self) -> usize {
        self.entries.ncols()
    }
}

/// Draws `H = K^{1/2}·Z` with `Z` an `L x M` matrix of i.i.d. CN(0, 1) entries.
pub fn sample_channels<R: Rng + ?Sized>(
    model: &CorrelationModel,
    m_users: usize,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    color_white(model.covariance_sqrt(), m_users, rng).map(ChannelMatrix::full)
}

/// Coloring transform `S·Z` for a real square-root factor `S`.
pub fn color_white<R: Rng + ?Sized>(sqrt_factor: &RMatrix, m_users: usize, rng: &mut R) -> Result<CMatrix> {
    if m_users == 0 {
        return Err(Error::argument("at least one UE is required"));
    }
    let z = complex_gaussian_matrix(rng, sqrt_factor.ncols(), m_users);
    // The factor is real: color the real and imaginary parts separately.
    let re = sqrt_factor * z.map(|c| c.re);
    let im = sqrt_factor * z.map(|c| c.im);
    Ok(re.zip_map(&im, C64::new))
}

/// Log-distance attenuation of the UE-RIS link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathLossParams {
    /// Attenuation at 1 m, in dB.
    pub ref_loss_db: f64,
    pub exponent: f64,
    pub distance_m: f64,
}

impl Default for PathLossParams {
    fn default() -> Self {
        Self {
            ref_loss_db: 30.0,
            exponent: 2.2,
            distance_m: 20.0,
        }
    }
}

/// `μ = 10^{-ref_loss_db/10} · d^{-exponent}` as a linear power ratio.
pub fn large_scale_coefficient(p: &PathLossParams) -> Result<f64> {
    if !(p.distance_m.is_finite() && p.distance_m > 0.0) {
        return Err(Error::argument(format!("distance must be positive, got {}", p.distance_m)));
    }
    if !(p.exponent.is_finite() && p.exponent >= 0.0) {
        return Err(Error::argument(format!("path-loss exponent must be >= 0, got {}", p.exponent)));
    }
    if !p.ref_loss_db.is_finite() {
        return Err(Error::argument("reference loss must be finite"));
    }
    Ok(10f64.powf(-p.ref_loss_db / 10.0) * p.distance_m.powf(-p.exponent))
}

/// Rows of `h` for the active elements, in active-set order.
pub fn extract_rows(h: &ChannelMatrix, act: &ActiveSet) -> Result<ChannelMatrix> {
    let positions = act
        .indices()
        .iter()
        .map(|&g| {
            h.rows
                .iter()
                .position(|&r| r == g)
                .ok_or_else(|| Error::argument(format!("element {g} is not a row of the channel")))
        })
        .collect::<Result<Vec<_>>>()?;
    let entries = h.entries.select_rows(positions.iter());
    Ok(ChannelMatrix {
        entries,
        rows: act.indices().to_vec(),
    })
}
