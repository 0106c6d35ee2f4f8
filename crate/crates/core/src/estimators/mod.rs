//! Full-channel estimators that start from the LS estimate at the active elements.
//!
//! All three estimators copy the LS rows of the active elements into the
//! output and differ only in how passive rows are filled in:
//!
//! - [`estimate_proposed`]: correlation-ranked, exponentially weighted
//!   combination of `M` active rows, rescaled to the mean norm of those rows.
//! - [`estimate_random_baseline`]: `M` random active rows with CN(0, 1) coefficients.
//! - [`estimate_omp_baseline`]: OMP fit of the active rows over a UPA steering
//!   dictionary, extended to the passive rows through the full dictionary.

mod active;
mod dictionary;
mod omp;
mod proposed;
mod random;

pub use active::{select_active, ActiveSet, PlacementPolicy};
pub use dictionary::{build_upa_dictionary, sine_grid, steering_vector};
pub use omp::{estimate_omp_baseline, omp_recover, OmpSolution, OMP_RANK_TOL};
pub use proposed::{estimate_proposed, exponential_weight, plan_selection, PassiveRowPlan, SelectionPlan};
pub use random::estimate_random_baseline;

use crate::channel::ChannelMatrix;
use crate::{CMatrix, Error, Result};

/// Full `L x M` estimate plus bookkeeping about how it was produced.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub channel: ChannelMatrix,
    /// Passive elements whose weighted combination vanished; their rows are zero.
    pub degenerate_rows: Vec<usize>,
    /// Atoms OMP rejected because they made the sub-dictionary rank deficient.
    pub dropped_atoms: usize,
    /// Complex multiply-accumulates spent building passive rows.
    pub macs: u64,
    /// Atom/residual inner products evaluated (OMP only).
    pub inner_products: u64,
}

impl Estimate {
    fn new(channel: ChannelMatrix) -> Self {
        Self {
            channel,
            degenerate_rows: Vec::new(),
            dropped_atoms: 0,
            macs: 0,
            inner_products: 0,
        }
    }

    /// Short labels describing anything unusual about this estimate.
    pub fn flags(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.degenerate_rows.is_empty() {
            out.push(format!("degenerate_rows={}", self.degenerate_rows.len()));
        }
        if self.dropped_atoms > 0 {
            out.push(format!("omp_dropped_atoms={}", self.dropped_atoms));
        }
        out
    }
}

/// Starts an `L x M` estimate with the active rows copied from `h_tilde_act`.
fn with_active_rows(h_tilde_act: &ChannelMatrix, act: &ActiveSet, total_l: usize) -> Result<CMatrix> {
    if act.total() != total_l {
        return Err(Error::argument(format!(
            "active set drawn from {} elements, estimate requested for {total_l}",
            act.total()
        )));
    }
    if h_tilde_act.row_indices() != act.indices() {
        return Err(Error::argument("LS estimate rows do not match the active set"));
    }
    let mut out = CMatrix::zeros(total_l, h_tilde_act.num_users());
    for (k, &g) in act.indices().iter().enumerate() {
        out.set_row(g - 1, &h_tilde_act.entries().row(k));
    }
    Ok(out)
}

fn require_enough_active(act: &ActiveSet, m_users: usize) -> Result<()> {
    if act.len() < m_users {
        return Err(Error::config(format!(
            "{} active elements cannot supply {m_users} rows per passive element",
            act.len()
        )));
    }
    Ok(())
}
