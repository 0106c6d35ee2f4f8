//! Channel estimation for reconfigurable intelligent surfaces (RIS) that carry
//! a small number of receive-capable ("active") elements.
//!
//! The crate synthesizes spatially correlated UE-RIS channels, simulates pilot
//! training observed at the active elements, extrapolates the full channel with
//! a correlation-weighted linear combination of the observed rows, and compares
//! it against a random-coefficient baseline and an OMP compressed-sensing
//! baseline. The [`harness`] module runs the Monte-Carlo campaigns and writes
//! CSV results.
//!
//! Module map:
//!
//! - [`geometry`]: UPA element layout, sinc spatial correlation, covariance and its PSD square root.
//! - [`channel`]: correlated Rayleigh channel synthesis and large-scale attenuation.
//! - [`training`]: orthonormal pilots, pilot reception at active elements, LS sub-channel estimate.
//! - [`estimators`]: active-element placement, the proposed estimator and the baselines.
//! - [`analysis`]: numerical rank, rank CDFs and the NMSE metric.
//! - [`harness`]: configuration, campaign orchestration and CSV persistence.

pub mod analysis;
pub mod channel;
pub mod error;
pub mod estimators;
pub mod geometry;
pub mod harness;
pub mod rng;
pub mod training;

pub use error::{Error, Result};

/// Complex baseband sample.
pub type C64 = nalgebra::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense real matrix.
pub type RMatrix = nalgebra::DMatrix<f64>;
