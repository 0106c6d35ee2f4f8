//! UPA steering dictionary over uniform sine-space grids.
//!
//! Grid point `(ν, η)` maps to the array response
//! `a_ℓ = exp(j·2π/λ·(i(ℓ)·d_h·ν + j(ℓ)·d_v·η))/√L`, where `ν` and `η` are the
//! direction sines along the horizontal and vertical array axes. Each axis is
//! sampled at `-1 + 2q/n` for `q = 0..n`, so broadside `(0, 0)` is on the grid
//! whenever `n` is even.

use std::f64::consts::PI;

use nalgebra::DVector;

use crate::geometry::RisGeometry;
use crate::{CMatrix, Error, Result, C64};

pub fn sine_grid(n: usize) -> Vec<f64> {
    (0..n).map(|q| -1.0 + 2.0 * q as f64 / n as f64).collect()
}

pub fn steering_vector(geom: &RisGeometry, nu: f64, eta: f64) -> DVector<C64> {
    let l = geom.num_elements();
    let k = 2.0 * PI / geom.lambda();
    let mut v = DVector::from_fn(l, |a, _| {
        let (i, j) = ((a % geom.l_h()) as f64, (a / geom.l_h()) as f64);
        C64::from_polar(1.0, k * (i * geom.d_h() * nu + j * geom.d_v() * eta))
    });
    let n = v.norm();
    v /= C64::from(n);
    v
}

/// `L x (n_az·n_el)` dictionary; column `q·n_el + s` steers to
/// `(sine_grid(n_az)[q], sine_grid(n_el)[s])`.
pub fn build_upa_dictionary(geom: &RisGeometry, n_az: usize, n_el: usize) -> Result<CMatrix> {
    if n_az == 0 || n_el == 0 {
        return Err(Error::argument(format!("dictionary grid sizes must be positive, got {n_az}x{n_el}")));
    }
    let az = sine_grid(n_az);
    let el = sine_grid(n_el);
    let mut dict = CMatrix::zeros(geom.num_elements(), n_az * n_el);
    for (q, &nu) in az.iter().enumerate() {
        for (s, &eta) in el.iter().enumerate() {
            dict.set_column(q * n_el + s, &steering_vector(geom, nu, eta));
        }
    }
    Ok(dict)
}
