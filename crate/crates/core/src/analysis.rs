//! Numerical rank, rank CDF statistics and the NMSE metric.

use nalgebra::{ComplexField, DMatrix};

use crate::channel::ChannelMatrix;
use crate::estimators::{select_active, ActiveSet, PlacementPolicy};
use crate::geometry::{build_correlation, build_covariance, CorrelationModel, RisGeometry};
use crate::rng::{derive_seed, seeded};
use crate::{Error, RMatrix, Result};

/// Default relative rank threshold: `10³·max(rows, cols)·ε`.
pub fn default_rank_tol(rows: usize, cols: usize) -> f64 {
    1e3 * rows.max(cols) as f64 * f64::EPSILON
}

/// Singular values in descending order.
pub fn singular_values<T>(m: &DMatrix<T>) -> Result<Vec<f64>>
where
    T: ComplexField<RealField = f64>,
{
    if m.is_empty() {
        return Err(Error::argument("cannot take the SVD of an empty matrix"));
    }
    let svd = m
        .clone()
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Number of singular values strictly above `rel_tol·σ_max`.
pub fn numerical_rank<T>(m: &DMatrix<T>, rel_tol: f64) -> Result<usize>
where
    T: ComplexField<RealField = f64>,
{
    let s = singular_values(m)?;
    Ok(count_above(&s, rel_tol))
}

fn count_above(s: &[f64], rel_tol: f64) -> usize {
    match s.first() {
        Some(&max) if max > 0.0 => s.iter().filter(|&&v| v > rel_tol * max).count(),
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankSample {
    pub l_act: usize,
    pub total_l: usize,
    pub rank: usize,
    pub singular_values: Vec<f64>,
}

/// Rank of the active rows of `K^{1/2}`; `rel_tol = None` uses [`default_rank_tol`].
pub fn active_sqrt_rank(model: &CorrelationModel, act: &ActiveSet, rel_tol: Option<f64>) -> Result<RankSample> {
    let rows: Vec<usize> = act.indices().iter().map(|&g| g - 1).collect();
    let sub: RMatrix = model.covariance_sqrt().select_rows(rows.iter());
    let tol = rel_tol.unwrap_or_else(|| default_rank_tol(sub.nrows(), sub.ncols()));
    let s = singular_values(&sub)?;
    Ok(RankSample {
        l_act: act.len(),
        total_l: act.total(),
        rank: count_above(&s, tol),
        singular_values: s,
    })
}

/// One `(L_act, geometry)` configuration of the rank CDF experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankCase {
    pub l_act: usize,
    pub geometry: RisGeometry,
}

/// Correlation model with `A·μ = 1`, i.e. `K = R`.
pub fn unit_power_model(geom: &RisGeometry) -> Result<CorrelationModel> {
    build_covariance(build_correlation(geom), 1.0, 1.0)
}

/// One random placement: rank of `K_act^{1/2}` for the placement drawn from `seed`.
pub fn rank_trial(model: &CorrelationModel, l_act: usize, seed: u64, rel_tol: Option<f64>) -> Result<RankSample> {
    let mut rng = seeded(seed);
    let act = select_active(model.num_elements(), l_act, PlacementPolicy::Random, &mut rng)?;
    active_sqrt_rank(model, &act, rel_tol)
}

/// Empirical rank distribution of one case.
#[derive(Debug, Clone, PartialEq)]
pub struct RankCdf {
    pub l_act: usize,
    pub total_l: usize,
    pub ranks: Vec<usize>,
}

impl RankCdf {
    pub fn new(l_act: usize, total_l: usize, ranks: Vec<usize>) -> Self {
        Self { l_act, total_l, ranks }
    }

    /// `cdf()[r] = P(rank ≤ r)` for `r = 0..=L_act`.
    pub fn cdf(&self) -> Vec<f64> {
        let n = self.ranks.len() as f64;
        let mut counts = vec![0usize; self.l_act + 1];
        for &r in &self.ranks {
            counts[r.min(self.l_act)] += 1;
        }
        let mut acc = 0usize;
        counts
            .into_iter()
            .map(|c| {
                acc += c;
                acc as f64 / n
            })
            .collect()
    }

    /// Fraction of placements with `rank = L_act`.
    pub fn full_rank_probability(&self) -> f64 {
        self.ranks.iter().filter(|&&r| r == self.l_act).count() as f64 / self.ranks.len() as f64
    }
}

/// Rank CDFs over `placements` random placements per case. Placement `t` of
/// case `c` uses seed `derive_seed(master_seed, c·placements + t)`.
pub fn rank_cdf_experiment(
    cases: &[RankCase],
    placements: usize,
    master_seed: u64,
    rel_tol: Option<f64>,
) -> Result<Vec<RankCdf>> {
    cases
        .iter()
        .enumerate()
        .map(|(c, case)| {
            let model = unit_power_model(&case.geometry)?;
            let ranks = (0..placements)
                .map(|t| {
                    let seed = derive_seed(master_seed, (c * placements + t) as u64);
                    rank_trial(&model, case.l_act, seed, rel_tol).map(|s| s.rank)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(RankCdf::new(case.l_act, case.geometry.num_elements(), ranks))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nmse {
    pub value: f64,
    /// True rows with zero norm, left out of both the sum and the divisor.
    pub excluded_rows: usize,
}

/// `(1/L)·Σ_ℓ ‖H(ℓ,:) − Ĥ(ℓ,:)‖²/‖H(ℓ,:)‖²` over all rows.
pub fn nmse(h_true: &ChannelMatrix, h_est: &ChannelMatrix) -> Result<Nmse> {
    let rows: Vec<usize> = (0..h_true.num_rows()).collect();
    nmse_rows(h_true, h_est, &rows)
}

/// NMSE restricted to the given 0-based row positions.
pub fn nmse_rows(h_true: &ChannelMatrix, h_est: &ChannelMatrix, rows: &[usize]) -> Result<Nmse> {
    let (t, e) = (h_true.entries(), h_est.entries());
    if t.shape() != e.shape() {
        return Err(Error::argument(format!(
            "shape mismatch: true {:?}, estimate {:?}",
            t.shape(),
            e.shape()
        )));
    }
    let mut sum = 0.0;
    let mut used = 0usize;
    for &k in rows {
        let power: f64 = t.row(k).iter().map(|c| c.norm_sqr()).sum();
        if power == 0.0 {
            continue;
        }
        let err: f64 = t.row(k).iter().zip(e.row(k).iter()).map(|(a, b)| (a - b).norm_sqr()).sum();
        sum += err / power;
        used += 1;
    }
    if used == 0 {
        return Err(Error::UndefinedMetric);
    }
    Ok(Nmse {
        value: sum / used as f64,
        excluded_rows: rows.len() - used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::complex_gaussian_matrix;
    use crate::{CMatrix, C64};

    #[test]
    fn rank_of_simple_matrices() {
        assert_eq!(numerical_rank(&RMatrix::identity(4, 4), 1e-12).unwrap(), 4);
        let u = nalgebra::DVector::from_vec(vec![1.0, 2.0, 3.0]);
        let v = nalgebra::DVector::from_vec(vec![1.0, -1.0]);
        assert_eq!(numerical_rank(&(&u * v.transpose()), 1e-12).unwrap(), 1);
        assert_eq!(numerical_rank(&RMatrix::zeros(2, 2), 1e-12).unwrap(), 0);
        assert!(numerical_rank(&RMatrix::zeros(0, 0), 1e-12).is_err());
        let c = complex_gaussian_matrix(&mut seeded(1), 5, 3);
        assert_eq!(numerical_rank(&c, default_rank_tol(5, 3)).unwrap(), 3);
    }

    #[test]
    fn rank_is_scale_invariant() {
        let g = RisGeometry::with_spacing_in_wavelengths(8, 8, 0.125, 0.125, 1.0).unwrap();
        let r = build_correlation(&g);
        let tol = default_rank_tol(64, 64);
        let base = numerical_rank(&r, tol).unwrap();
        assert_eq!(numerical_rank(&(&r * 1e-9), tol).unwrap(), base);
        assert_eq!(numerical_rank(&(&r * 3e4), tol).unwrap(), base);
    }

    #[test]
    fn single_active_element_has_rank_one() {
        let g = RisGeometry::with_spacing_in_wavelengths(8, 8, 0.125, 0.125, 1.0).unwrap();
        let cases = [RankCase { l_act: 1, geometry: g }];
        let cdfs = rank_cdf_experiment(&cases, 50, 3, None).unwrap();
        assert_eq!(cdfs[0].full_rank_probability(), 1.0);
        assert_eq!(cdfs[0].cdf(), vec![0.0, 1.0]);
    }

    #[test]
    fn cdf_accumulates() {
        let cdf = RankCdf::new(3, 10, vec![3, 2, 3, 1]);
        assert_eq!(cdf.cdf(), vec![0.0, 0.25, 0.5, 1.0]);
        assert_eq!(cdf.full_rank_probability(), 0.5);
    }

    fn h(seed: u64) -> ChannelMatrix {
        ChannelMatrix::full(complex_gaussian_matrix(&mut seeded(seed), 6, 3))
    }

    #[test]
    fn nmse_reference_values() {
        let t = h(1);
        assert_eq!(nmse(&t, &t).unwrap().value, 0.0);
        let zero = ChannelMatrix::full(CMatrix::zeros(6, 3));
        assert!((nmse(&t, &zero).unwrap().value - 1.0).abs() < 1e-15);
        let double = ChannelMatrix::full(t.entries() * C64::new(2.0, 0.0));
        assert!((nmse(&t, &double).unwrap().value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn nmse_skips_zero_rows() {
        let mut e = h(2).into_entries();
        e.row_mut(3).fill(C64::new(0.0, 0.0));
        let t = ChannelMatrix::full(e);
        let est = ChannelMatrix::full(CMatrix::zeros(6, 3));
        let r = nmse(&t, &est).unwrap();
        assert_eq!(r.excluded_rows, 1);
        assert!((r.value - 1.0).abs() < 1e-15);
        let zero = ChannelMatrix::full(CMatrix::zeros(6, 3));
        assert!(matches!(nmse(&zero, &zero), Err(Error::UndefinedMetric)));
        assert!(nmse(&t, &ChannelMatrix::full(CMatrix::zeros(5, 3))).is_err());
    }
}
