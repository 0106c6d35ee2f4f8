use rand::Rng;

use crate::channel::ChannelMatrix;
use crate::rng::complex_gaussian;
use crate::Result;

use super::{require_enough_active, with_active_rows, ActiveSet, Estimate};

/// Baseline: every passive row is a combination of `M` uniformly chosen,
/// distinct active LS rows with i.i.d. CN(0, 1) coefficients. No
/// normalization is applied.
pub fn estimate_random_baseline<R: Rng + ?Sized>(
    h_tilde_act: &ChannelMatrix,
    act: &ActiveSet,
    total_l: usize,
    rng: &mut R,
) -> Result<Estimate> {
    let m = h_tilde_act.num_users();
    require_enough_active(act, m)?;
    let mut out = with_active_rows(h_tilde_act, act, total_l)?;
    let h = h_tilde_act.entries();
    let mut macs = 0u64;
    for l in act.passive() {
        let picks = rand::seq::index::sample(rng, act.len(), m);
        for k in picks.iter() {
            let coef = complex_gaussian(rng);
            for j in 0..m {
                out[(l - 1, j)] += h[(k, j)] * coef;
            }
            macs += m as u64;
        }
    }
    let mut est = Estimate::new(ChannelMatrix::full(out));
    est.macs = macs;
    Ok(est)
}
