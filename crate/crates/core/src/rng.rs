//! Random sources and per-trial seed derivation.
//!
//! Every trial draws from its own [`SimRng`] seeded by
//! [`derive_seed`]`(master_seed, trial_index)`, so the outcome of a trial does
//! not depend on which worker runs it or in what order.

use rand::{Rng, SeedableRng};
use rand_distr::StandardNormal;

use crate::{CMatrix, C64};

/// Generator used for all simulation draws.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for trial `trial_index` of a campaign started from `master_seed`.
pub fn derive_seed(master_seed: u64, trial_index: u64) -> u64 {
    mix64(mix64(master_seed) ^ trial_index.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

pub fn seeded(seed: u64) -> SimRng {
    SimRng::seed_from_u64(seed)
}

pub fn trial_rng(master_seed: u64, trial_index: u64) -> SimRng {
    seeded(derive_seed(master_seed, trial_index))
}

/// One draw from CN(0, 1): real and imaginary parts each have variance 1/2.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// `rows x cols` matrix of i.i.d. CN(0, 1) entries, filled column by column.
pub fn complex_gaussian_matrix<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_seeds_differ_per_trial_and_master() {
        let a = derive_seed(1, 0);
        assert_ne!(a, derive_seed(1, 1));
        assert_ne!(a, derive_seed(2, 0));
        assert_eq!(a, derive_seed(1, 0));
    }

    #[test]
    fn complex_gaussian_has_unit_variance_split_evenly() {
        let mut rng = seeded(7);
        let n = 200_000;
        let (mut re2, mut im2) = (0.0, 0.0);
        for _ in 0..n {
            let z = complex_gaussian(&mut rng);
            re2 += z.re * z.re;
            im2 += z.im * z.im;
        }
        let (re2, im2) = (re2 / n as f64, im2 / n as f64);
        assert!((re2 - 0.5).abs() < 0.01, "{re2}");
        assert!((im2 - 0.5).abs() < 0.01, "{im2}");
    }
}
