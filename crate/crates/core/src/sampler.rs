//! Reproducible sampling of the band ensemble and of GUE.
//!
//! Every sample draws from its own ChaCha8 stream selected by
//! `(master_seed, sample_index)`, so a sample never depends on which thread
//! produced it or on how many samples were drawn before it.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub use crate::hermitian::HermitianMatrix;
use crate::lattice::CovarianceProfile;
use crate::scalar::Real;

/// Coordinates of one independent random substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub master_seed: u64,
    pub sample_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self {
            master_seed,
            sample_index,
        }
    }

    /// Generator positioned at the start of this substream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.sample_index);
        rng
    }
}

/// One draw from the band ensemble with covariance `J`:
/// `H_ii ~ N(0, J_ii)`, and for `i < j` independent real and imaginary parts
/// with variance `J_ij / 2` each.
pub fn sample_rbm<T>(profile: &CovarianceProfile<T>, stream: RngStream) -> HermitianMatrix<T>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let mut rng = stream.rng();
    let half = T::lit(0.5);
    HermitianMatrix::from_upper(profile.sites(), |i, j| {
        let var = profile.get(i, j);
        if i == j {
            let g: T = StandardNormal.sample(&mut rng);
            Complex::new(var.sqrt() * g, T::zero())
        } else {
            let s = (var * half).sqrt();
            let re: T = StandardNormal.sample(&mut rng);
            let im: T = StandardNormal.sample(&mut rng);
            Complex::new(s * re, s * im)
        }
    })
}

/// One GUE draw normalised so that `E|H_ij|^2 = 1/N` (spectrum on `[-2, 2]`).
pub fn sample_gue<T>(dim: usize, stream: RngStream) -> HermitianMatrix<T>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let mut rng = stream.rng();
    let sd_diag = (T::one() / T::from_count(dim)).sqrt();
    let sd_off = (T::lit(0.5) / T::from_count(dim)).sqrt();
    HermitianMatrix::from_upper(dim, |i, j| {
        if i == j {
            let g: T = StandardNormal.sample(&mut rng);
            Complex::new(sd_diag * g, T::zero())
        } else {
            let re: T = StandardNormal.sample(&mut rng);
            let im: T = StandardNormal.sample(&mut rng);
            Complex::new(sd_off * re, sd_off * im)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{covariance_profile, Lattice1D};

    #[test]
    fn identical_streams_give_identical_matrices() {
        let profile = covariance_profile(Lattice1D::symmetric(4), 2.0).unwrap();
        let a = sample_rbm(&profile, RngStream::new(7, 123));
        let b = sample_rbm(&profile, RngStream::new(7, 123));
        assert_eq!(a, b);
        let c = sample_rbm(&profile, RngStream::new(7, 124));
        assert_ne!(a, c);
        let d = sample_rbm(&profile, RngStream::new(8, 123));
        assert_ne!(a, d);
    }

    #[test]
    fn exact_hermiticity() {
        let h: HermitianMatrix<f64> = sample_gue(9, RngStream::new(1, 2));
        for i in 0..9 {
            assert_eq!(h.get(i, i).im, 0.0);
            for j in 0..9 {
                assert_eq!(h.get(i, j), h.get(j, i).conj());
            }
        }
    }

    #[test]
    fn single_site_variance() {
        let profile = covariance_profile::<f64>(Lattice1D::symmetric(0), 3.0).unwrap();
        let n = 100_000;
        let var: f64 = (0..n)
            .map(|k| sample_rbm(&profile, RngStream::new(11, k)).get(0, 0).re.powi(2))
            .sum::<f64>()
            / n as f64;
        assert!((0.97..=1.03).contains(&var), "variance {var}");
    }

    #[test]
    fn gue_single_site_variance() {
        let n = 100_000;
        let var: f64 = (0..n)
            .map(|k| sample_gue::<f64>(1, RngStream::new(5, k)).get(0, 0).re.powi(2))
            .sum::<f64>()
            / n as f64;
        assert!((0.97..=1.03).contains(&var), "variance {var}");
    }

    #[test]
    fn f32_sampling() {
        let h: HermitianMatrix<f32> = sample_gue(4, RngStream::new(1, 1));
        assert!(h.frobenius_sq() > 0.0);
    }
}
