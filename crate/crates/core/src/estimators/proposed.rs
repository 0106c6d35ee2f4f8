//! Correlation-weighted linear combination estimator.
//!
//! For each passive element `ℓ` the `M` active elements with the largest
//! `|[R]_{ℓ,ψ}|` are selected (ties go to the smaller element index). Their LS
//! rows are combined with weights `sign(r)·exp(α|r|)` and the result is
//! rescaled to the mean norm `N_ℓ` of the selected rows.
//!
//! The plan depends only on `R`, the active set, `M` and `α`, so it can be
//! built once and reused across trials that share a placement.

use crate::channel::ChannelMatrix;
use crate::{Error, RMatrix, Result, C64};

use super::{require_enough_active, with_active_rows, ActiveSet, Estimate};

/// `sign(r)·exp(α|r|)`, with `sign(0) = 0`.
pub fn exponential_weight(r: f64, alpha: f64) -> f64 {
    if r == 0.0 {
        0.0
    } else {
        r.signum() * (alpha * r.abs()).exp()
    }
}

/// Rows selected for one passive element.
#[derive(Debug, Clone, PartialEq)]
pub struct PassiveRowPlan {
    /// 1-based passive element index `ℓ`.
    pub element: usize,
    /// 0-based row positions within the LS sub-channel, best match first.
    pub local_rows: Vec<usize>,
    /// 1-based element indices of those rows.
    pub global_indices: Vec<usize>,
    pub weights: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionPlan {
    rows: Vec<PassiveRowPlan>,
    m_users: usize,
    alpha: f64,
}

impl SelectionPlan {
    /// Per-element plans in ascending element order.
    pub fn rows(&self) -> &[PassiveRowPlan] {
        &self.rows
    }

    pub fn m_users(&self) -> usize {
        self.m_users
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

pub fn plan_selection(r: &RMatrix, act: &ActiveSet, m_users: usize, alpha: f64) -> Result<SelectionPlan> {
    if m_users == 0 {
        return Err(Error::argument("at least one UE is required"));
    }
    require_enough_active(act, m_users)?;
    if r.nrows() != act.total() || !r.is_square() {
        return Err(Error::argument(format!(
            "correlation matrix is {}x{} but the active set covers {} elements",
            r.nrows(),
            r.ncols(),
            act.total()
        )));
    }
    if !alpha.is_finite() {
        return Err(Error::argument("alpha must be finite"));
    }

    let mut order: Vec<usize> = (0..act.len()).collect();
    let rows = act
        .passive()
        .into_iter()
        .map(|l| {
            let corr = |k: usize| r[(l - 1, act.indices()[k] - 1)];
            order.sort_by(|&a, &b| {
                corr(b)
                    .abs()
                    .total_cmp(&corr(a).abs())
                    .then(act.indices()[a].cmp(&act.indices()[b]))
            });
            let local_rows = order[..m_users].to_vec();
            PassiveRowPlan {
                element: l,
                global_indices: local_rows.iter().map(|&k| act.indices()[k]).collect(),
                weights: local_rows.iter().map(|&k| exponential_weight(corr(k), alpha)).collect(),
                local_rows,
            }
        })
        .collect();
    Ok(SelectionPlan { rows, m_users, alpha })
}

fn row_norm(m: &crate::CMatrix, row: usize) -> f64 {
    m.row(row).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Fills passive rows with `N_ℓ·c_ℓ/‖c_ℓ‖`, `c_ℓ = Σ_m w_m·H̃_act(π_m, :)` and
/// `N_ℓ` the mean norm of the selected rows. Active rows are the LS rows.
pub fn estimate_proposed(
    h_tilde_act: &ChannelMatrix,
    plan: &SelectionPlan,
    act: &ActiveSet,
    total_l: usize,
) -> Result<Estimate> {
    if h_tilde_act.num_users() != plan.m_users {
        return Err(Error::argument(format!(
            "plan built for {} UEs, LS estimate has {}",
            plan.m_users,
            h_tilde_act.num_users()
        )));
    }
    if plan.rows.len() != total_l - act.len() {
        return Err(Error::argument("plan does not cover the passive elements of this active set"));
    }
    let mut out = with_active_rows(h_tilde_act, act, total_l)?;
    let h = h_tilde_act.entries();
    let m = h.ncols();
    let mut degenerate = Vec::new();
    let mut macs = 0u64;
    let mut combo = vec![C64::new(0.0, 0.0); m];

    for row in &plan.rows {
        combo.iter_mut().for_each(|c| *c = C64::new(0.0, 0.0));
        let mut norm_sum = 0.0;
        for (&k, &w) in row.local_rows.iter().zip(&row.weights) {
            for (c, x) in combo.iter_mut().zip(h.row(k).iter()) {
                *c += x * w;
            }
            macs += m as u64;
            norm_sum += row_norm(h, k);
        }
        let target = norm_sum / row.local_rows.len() as f64;
        let len = combo.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let dst = row.element - 1;
        if len > 0.0 {
            let scale = target / len;
            for (j, c) in combo.iter().enumerate() {
                out[(dst, j)] = c * scale;
            }
        } else {
            degenerate.push(row.element);
        }
    }

    let mut est = Estimate::new(ChannelMatrix::full(out));
    est.degenerate_rows = degenerate;
    est.macs = macs;
    Ok(est)
}
