//! Orthogonal matching pursuit baseline.
//!
//! Each UE column of the LS sub-channel is modelled as a sparse combination of
//! dictionary atoms restricted to the active rows. OMP picks the atom with the
//! largest normalized correlation to the current residual, refits all picked
//! atoms by least squares, and repeats until `p` atoms are in the support. The
//! passive rows are then read off the full dictionary with the fitted gains.

use nalgebra::DVector;

use crate::channel::ChannelMatrix;
use crate::{CMatrix, Error, Result, C64};

use super::{with_active_rows, ActiveSet, Estimate};

/// Smallest singular value of the selected sub-dictionary, relative to the
/// largest, below which a newly picked atom is rejected.
pub const OMP_RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OmpSolution {
    /// Selected atom (column) indices in pick order.
    pub support: Vec<usize>,
    /// LS gains for `support`.
    pub gains: DVector<C64>,
    /// `‖y − A_S·g‖` on the observed rows.
    pub residual_norm: f64,
    pub inner_products: u64,
    /// Atoms rejected because they made the fit rank deficient.
    pub dropped: Vec<usize>,
}

/// Greedy `p`-sparse fit of `y` over the columns of `dict`.
///
/// Stops early once the residual vanishes to round-off or every atom has been
/// used or rejected.
pub fn omp_recover(dict: &CMatrix, y: &DVector<C64>, p: usize) -> Result<OmpSolution> {
    if p == 0 {
        return Err(Error::argument("sparsity level must be at least 1"));
    }
    if dict.nrows() != y.len() {
        return Err(Error::argument(format!(
            "dictionary has {} rows, observation has {}",
            dict.nrows(),
            y.len()
        )));
    }
    let n_atoms = dict.ncols();
    let col_norms: Vec<f64> = dict.column_iter().map(|c| c.norm()).collect();
    let mut blocked: Vec<bool> = col_norms.iter().map(|&n| n == 0.0).collect();

    let y_norm = y.norm();
    let mut support: Vec<usize> = Vec::with_capacity(p);
    let mut gains = DVector::<C64>::zeros(0);
    let mut residual = y.clone();
    let mut inner_products = 0u64;
    let mut dropped = Vec::new();

    while support.len() < p && residual.norm() > 1e-13 * y_norm {
        let mut best: Option<(usize, f64)> = None;
        for (i, atom) in dict.column_iter().enumerate() {
            if blocked[i] {
                continue;
            }
            inner_products += 1;
            let score = atom.dotc(&residual).norm() / col_norms[i];
            if best.map_or(true, |(_, s)| score > s) {
                best = Some((i, score));
            }
        }
        let Some((pick, _)) = best else { break };
        blocked[pick] = true;

        let mut trial = support.clone();
        trial.push(pick);
        let sub = dict.select_columns(trial.iter());
        let svd = sub.clone().svd(true, true);
        let (smax, smin) = svd
            .singular_values
            .iter()
            .fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
        if smin <= OMP_RANK_TOL * smax {
            dropped.push(pick);
            continue;
        }
        gains = svd
            .solve(y, 0.0)
            .map_err(|e| Error::Numerical(format!("OMP least-squares refit failed: {e}")))?;
        residual = y - &sub * &gains;
        support = trial;
        if support.len() + dropped.len() >= n_atoms {
            break;
        }
    }

    Ok(OmpSolution {
        residual_norm: residual.norm(),
        support,
        gains,
        inner_products,
        dropped,
    })
}

/// OMP estimate of the full channel; active rows keep their LS values.
pub fn estimate_omp_baseline(
    h_tilde_act: &ChannelMatrix,
    act: &ActiveSet,
    dict: &CMatrix,
    p: usize,
) -> Result<Estimate> {
    if p == 0 || p > act.len() {
        return Err(Error::config(format!(
            "OMP sparsity {p} must be in 1..={} (number of active elements)",
            act.len()
        )));
    }
    if dict.nrows() != act.total() {
        return Err(Error::argument(format!(
            "dictionary has {} rows for a surface of {} elements",
            dict.nrows(),
            act.total()
        )));
    }
    let mut out = with_active_rows(h_tilde_act, act, act.total())?;
    let observed = dict.select_rows(act.indices().iter().map(|&g| g - 1).collect::<Vec<_>>().iter());
    let passive = act.passive();
    let l_act = act.len() as u64;
    let mut inner_products = 0u64;
    let mut dropped = 0usize;
    let mut macs = 0u64;

    for (j, y) in h_tilde_act.entries().column_iter().enumerate() {
        let sol = omp_recover(&observed, &y.into_owned(), p)?;
        inner_products += sol.inner_products;
        dropped += sol.dropped.len();
        for &l in &passive {
            let v = sol
                .support
                .iter()
                .zip(sol.gains.iter())
                .fold(C64::new(0.0, 0.0), |acc, (&a, g)| acc + dict[(l - 1, a)] * g);
            out[(l - 1, j)] = v;
        }
        macs += (passive.len() * sol.support.len()) as u64;
    }

    let mut est = Estimate::new(ChannelMatrix::full(out));
    est.inner_products = inner_products;
    est.dropped_atoms = dropped;
    est.macs = macs + inner_products * l_act;
    Ok(est)
}
