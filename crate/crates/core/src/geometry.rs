//! Element layout of the surface and the spatial correlation model built on it.
//!
//! Elements sit on a uniform planar array in the y-z plane. Element `a`
//! (1-based) is at `[0, i(a)·d_h, j(a)·d_v]` with `i(a) = (a-1) mod L_h` and
//! `j(a) = ⌊(a-1)/L_h⌋`. The normalized correlation between two elements is
//! `sinc(2‖u_a − u_b‖/λ)` and the covariance of every UE's channel is
//! `K = A·μ·R` with `A = d_h·d_v` the element area.

use nalgebra::SymmetricEigen;

use crate::{Error, RMatrix, Result};

/// Relative band, as a fraction of the largest eigenvalue, inside which
/// eigenvalues are treated as zero when taking PSD square roots.
pub const DEFAULT_CLAMP_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGeometry {
    l_h: usize,
    l_v: usize,
    d_h: f64,
    d_v: f64,
    lambda: f64,
}

impl RisGeometry {
    /// `d_h`, `d_v` and `lambda` are in meters.
    pub fn new(l_h: usize, l_v: usize, d_h: f64, d_v: f64, lambda: f64) -> Result<Self> {
        if l_h == 0 || l_v == 0 {
            return Err(Error::argument(format!(
                "array dimensions must be positive, got {l_h}x{l_v}"
            )));
        }
        for (name, v) in [("d_h", d_h), ("d_v", d_v), ("lambda", lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::argument(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(Self {
            l_h,
            l_v,
            d_h,
            d_v,
            lambda,
        })
    }

    /// Geometry with spacings given as fractions of the wavelength.
    pub fn with_spacing_in_wavelengths(
        l_h: usize,
        l_v: usize,
        d_h_wl: f64,
        d_v_wl: f64,
        lambda: f64,
    ) -> Result<Self> {
        Self::new(l_h, l_v, d_h_wl * lambda, d_v_wl * lambda, lambda)
    }

    pub fn l_h(&self) -> usize {
        self.l_h
    }

    pub fn l_v(&self) -> usize {
        self.l_v
    }

    pub fn d_h(&self) -> f64 {
        self.d_h
    }

    pub fn d_v(&self) -> f64 {
        self.d_v
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Total number of elements `L = L_h·L_v`.
    pub fn num_elements(&self) -> usize {
        self.l_h * self.l_v
    }

    /// Element area `A = d_h·d_v` in m².
    pub fn area(&self) -> f64 {
        self.d_h * self.d_v
    }

    /// Horizontal and vertical grid coordinates `(i(a), j(a))` of 1-based element `a`.
    pub fn grid_coords(&self, a: usize) -> Result<(usize, usize)> {
        self.check_index(a)?;
        Ok(((a - 1) % self.l_h, (a - 1) / self.l_h))
    }

    /// Position of 1-based element `a` in meters.
    pub fn element_position(&self, a: usize) -> Result<[f64; 3]> {
        let (i, j) = self.grid_coords(a)?;
        Ok([0.0, i as f64 * self.d_h, j as f64 * self.d_v])
    }

    fn check_index(&self, a: usize) -> Result<()> {
        let l = self.num_elements();
        if a == 0 || a > l {
            return Err(Error::argument(format!("element index {a} outside 1..={l}")));
        }
        Ok(())
    }
}

/// Normalized sinc, `sin(πx)/(πx)`, exactly 1 at the origin.
pub fn sinc(x: f64) -> f64 {
    let px = std::f64::consts::PI * x;
    if px.abs() < 1e-6 {
        // Taylor series; the x^4 term is below f64 resolution here.
        1.0 - px * px / 6.0
    } else {
        px.sin() / px
    }
}

/// Normalized spatial correlation matrix `[R]_{a,b} = sinc(2‖u_a − u_b‖/λ)`.
///
/// Each unordered pair is evaluated once and mirrored, so the result is
/// bitwise symmetric with an exact unit diagonal.
pub fn build_correlation(geom: &RisGeometry) -> RMatrix {
    let l = geom.num_elements();
    let coords: Vec<(i64, i64)> = (0..l)
        .map(|a| ((a % geom.l_h) as i64, (a / geom.l_h) as i64))
        .collect();
    let mut r = RMatrix::identity(l, l);
    for a in 0..l {
        for b in (a + 1)..l {
            // distance from integer grid offsets, so equal offsets give identical entries
            let dy = (coords[a].0 - coords[b].0) as f64 * geom.d_h;
            let dz = (coords[a].1 - coords[b].1) as f64 * geom.d_v;
            let v = sinc(2.0 * dy.hypot(dz) / geom.lambda);
            r[(a, b)] = v;
            r[(b, a)] = v;
        }
    }
    r
}

/// Spatial covariance `K = A·μ·R` of each UE-RIS channel column, together with
/// its principal square root used for the coloring transform.
#[derive(Debug, Clone)]
pub struct CorrelationModel {
    r: RMatrix,
    area: f64,
    large_scale: f64,
    k: RMatrix,
    k_sqrt: RMatrix,
}

impl CorrelationModel {
    /// Model for a geometry with large-scale coefficient `mu`.
    pub fn for_geometry(geom: &RisGeometry, mu: f64) -> Result<Self> {
        build_covariance(build_correlation(geom), geom.area(), mu)
    }

    /// Normalized correlation matrix `R`.
    pub fn correlation(&self) -> &RMatrix {
        &self.r
    }

    pub fn covariance(&self) -> &RMatrix {
        &self.k
    }

    /// Principal square root `K^{1/2}`.
    pub fn covariance_sqrt(&self) -> &RMatrix {
        &self.k_sqrt
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn large_scale(&self) -> f64 {
        self.large_scale
    }

    /// Scale `A·μ` applied to `R`.
    pub fn power_scale(&self) -> f64 {
        self.area * self.large_scale
    }

    pub fn num_elements(&self) -> usize {
        self.r.nrows()
    }
}

/// Builds `K = A·μ·R` and its PSD square root.
pub fn build_covariance(r: RMatrix, area: f64, mu: f64) -> Result<CorrelationModel> {
    validate_correlation(&r)?;
    if !(area.is_finite() && area > 0.0) {
        return Err(Error::argument(format!("element area must be positive, got {area}")));
    }
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::argument(format!("large-scale coefficient must be positive, got {mu}")));
    }
    let k = &r * (area * mu);
    let k_sqrt = matrix_sqrt_psd(&k, DEFAULT_CLAMP_TOL)?;
    Ok(CorrelationModel {
        r,
        area,
        large_scale: mu,
        k,
        k_sqrt,
    })
}

fn validate_correlation(r: &RMatrix) -> Result<()> {
    if !r.is_square() || r.nrows() == 0 {
        return Err(Error::argument(format!(
            "correlation matrix must be square and nonempty, got {}x{}",
            r.nrows(),
            r.ncols()
        )));
    }
    let n = r.nrows();
    for a in 0..n {
        if r[(a, a)] != 1.0 {
            return Err(Error::argument(format!(
                "correlation diagonal entry ({a},{a}) is {} instead of 1",
                r[(a, a)]
            )));
        }
        for b in 0..n {
            let v = r[(a, b)];
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::argument(format!("correlation entry ({a},{b}) = {v} outside [-1, 1]")));
            }
            if v != r[(b, a)] {
                return Err(Error::argument(format!("correlation matrix not symmetric at ({a},{b})")));
            }
        }
    }
    Ok(())
}

/// Principal square root of a real symmetric PSD matrix via eigendecomposition.
///
/// Eigenvalues within `clamp_tol·λ_max` of zero (on either side) are set to
/// zero; anything more negative is rejected.
pub fn matrix_sqrt_psd(m: &RMatrix, clamp_tol: f64) -> Result<RMatrix> {
    if !m.is_square() {
        return Err(Error::argument(format!("expected a square matrix, got {}x{}", m.nrows(), m.ncols())));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(m.clone());
    }
    let scale = m.amax();
    if scale == 0.0 {
        return Ok(RMatrix::zeros(n, n));
    }
    let asym = (m - m.transpose()).amax();
    if asym > 1e-12 * scale {
        return Err(Error::argument(format!("matrix is not symmetric (max asymmetry {asym:e})")));
    }

    let eig = SymmetricEigen::new(m.clone());
    let max_ev = eig.eigenvalues.max();
    let min_ev = eig.eigenvalues.min();
    let band = clamp_tol * max_ev.max(0.0);
    if min_ev < -band || max_ev <= 0.0 {
        return Err(Error::NotPsd {
            min_eigenvalue: min_ev,
            max_eigenvalue: max_ev,
            tolerance: clamp_tol,
        });
    }
    let roots = eig.eigenvalues.map(|v| if v <= band { 0.0 } else { v.sqrt() });
    let v = &eig.eigenvectors;
    let mut s = v * RMatrix::from_diagonal(&roots) * v.transpose();
    // Mirror the upper triangle so the result is exactly symmetric.
    for a in 0..n {
        for b in (a + 1)..n {
            let avg = 0.5 * (s[(a, b)] + s[(b, a)]);
            s[(a, b)] = avg;
            s[(b, a)] = avg;
        }
    }
    Ok(s)
}
