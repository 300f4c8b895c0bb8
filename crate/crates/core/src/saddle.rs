//! Semicircle density, saddle-point data of
//! `f(x) = (x + iλ₀/2)²/2 - log(x - iλ₀/2)`, bulk unfolding and the sine kernel.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// `ρ(λ) = sqrt(4 - λ²) / 2π` on `[-2, 2]`, zero outside.
pub fn semicircle_density<T: Real>(lambda: T) -> T {
    let four = T::lit(4.0);
    if lambda.abs() >= T::lit(2.0) {
        return T::zero();
    }
    (four - lambda * lambda).sqrt() / (T::lit(2.0) * T::PI())
}

/// Distribution function of the semicircle law.
pub fn semicircle_cdf<T: Real>(lambda: T) -> T {
    let two = T::lit(2.0);
    if lambda <= -two {
        return T::zero();
    }
    if lambda >= two {
        return T::one();
    }
    let half = T::lit(0.5);
    half + lambda * (T::lit(4.0) - lambda * lambda).sqrt() / (T::lit(4.0) * T::PI())
        + (lambda / two).asin() / T::PI()
}

fn check_bulk<T: Real>(lambda0: T) -> Result<()> {
    if lambda0.abs() < T::lit(2.0) {
        Ok(())
    } else {
        Err(Error::OutsideBulk(lambda0.to_f64().unwrap_or(f64::NAN)))
    }
}

/// Saddle points `a_± = ±πρ(λ₀)` with the second-order coefficients
/// `c_± = f''(a_±)/2` and `c₀ = Re f(a_±)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData<T> {
    pub lambda0: T,
    pub rho: T,
    pub a_plus: T,
    pub a_minus: T,
    pub c_plus: Complex<T>,
    pub c_minus: Complex<T>,
    pub c0: T,
}

pub fn saddle_data<T: Real>(lambda0: T) -> Result<SaddleData<T>> {
    check_bulk(lambda0)?;
    let quarter = T::lit(0.25);
    let half = T::lit(0.5);
    let l2 = lambda0 * lambda0;
    let a = (T::lit(4.0) - l2).sqrt() * half;
    let re_c = T::one() - l2 * quarter;
    let im_c = lambda0 * half * re_c.sqrt();
    Ok(SaddleData {
        lambda0,
        rho: semicircle_density(lambda0),
        a_plus: a,
        a_minus: -a,
        c_plus: Complex::new(re_c, im_c),
        c_minus: Complex::new(re_c, -im_c),
        c0: half - l2 * quarter,
    })
}

/// `f(x) = (x + iλ₀/2)²/2 - log(x - iλ₀/2)`, principal logarithm.
pub fn f<T: Real>(x: Complex<T>, lambda0: T) -> Result<Complex<T>> {
    let half = T::lit(0.5);
    let shift = Complex::new(T::zero(), lambda0 * half);
    let base = x - shift;
    if base.re == T::zero() && base.im == T::zero() {
        return Err(Error::Singular(format!(
            "f has a logarithmic singularity at x = i{}",
            lambda0 * half
        )));
    }
    let plus = x + shift;
    Ok(plus * plus * half - base.ln())
}

/// `f_*(x) = Re(f(x) - f(a_±))` for real `x`; `+inf` at the singular point.
pub fn f_star<T: Real>(x: T, lambda0: T) -> T {
    let half = T::lit(0.5);
    let q = lambda0 * lambda0 * T::lit(0.25);
    let c0 = half - q;
    half * (x * x - q - (x * x + q).ln()) - c0
}

/// `sin(πδ) / (πδ)`; series below `|πδ| < 1e-4`.
pub fn sine_kernel<T: Real>(delta_xi: T) -> T {
    let z = T::PI() * delta_xi;
    if z.abs() < T::lit(1e-4) {
        let z2 = z * z;
        T::one() - z2 / T::lit(6.0) + z2 * z2 / T::lit(120.0)
    } else {
        z.sin() / z
    }
}

/// Bulk unfolding `λ_j = λ₀ + ξ_j / (N ρ(λ₀))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams<T> {
    pub lambda0: T,
    pub xi1: T,
    pub xi2: T,
    pub n: usize,
    pub lambda1: T,
    pub lambda2: T,
}

impl<T: Real> SpectralParams<T> {
    /// Same point with the roles of `ξ₁` and `ξ₂` exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            xi1: self.xi2,
            xi2: self.xi1,
            lambda1: self.lambda2,
            lambda2: self.lambda1,
            ..*self
        }
    }
}

pub fn scaled_lambdas<T: Real>(lambda0: T, xi1: T, xi2: T, n: usize) -> Result<SpectralParams<T>> {
    check_bulk(lambda0)?;
    if n == 0 {
        return Err(Error::InvalidArgument("matrix size must be positive".into()));
    }
    let unit = T::from_count(n) * semicircle_density(lambda0);
    Ok(SpectralParams {
        lambda0,
        xi1,
        xi2,
        n,
        lambda1: lambda0 + xi1 / unit,
        lambda2: lambda0 + xi2 / unit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn density_values() {
        assert_relative_eq!(semicircle_density(0.0), 1.0 / PI, epsilon = 1e-15);
        assert_eq!(semicircle_density(2.0), 0.0);
        assert_eq!(semicircle_density(-2.0), 0.0);
        assert_eq!(semicircle_density(3.0), 0.0);
    }

    #[test]
    fn density_integrates_to_one() {
        // Substituting λ = 2 sin θ makes the integrand smooth and periodic,
        // so the midpoint rule is spectrally accurate.
        let n = 2000;
        let h = PI / n as f64;
        let total: f64 = (0..n)
            .map(|k| {
                let th = -PI / 2.0 + (k as f64 + 0.5) * h;
                semicircle_density(2.0 * th.sin()) * 2.0 * th.cos() * h
            })
            .sum();
        assert!((total - 1.0).abs() < 1e-10);
        assert!((semicircle_cdf(0.0) - 0.5f64).abs() < 1e-15);
        assert_eq!(semicircle_cdf(2.0), 1.0);
    }

    #[test]
    fn saddle_at_origin() {
        let s = saddle_data(0.0).unwrap();
        assert_eq!((s.a_plus, s.a_minus), (1.0, -1.0));
        assert_eq!(s.c_plus, Complex::new(1.0, 0.0));
        assert_eq!(s.c0, 0.5);
    }

    #[test]
    fn saddle_at_one() {
        let s = saddle_data(1.0).unwrap();
        assert_relative_eq!(s.a_plus, 3f64.sqrt() / 2.0, epsilon = 1e-15);
        assert_relative_eq!(s.c_plus.re, 0.75);
        assert_relative_eq!(s.a_plus, PI * s.rho, epsilon = 1e-15);
    }

    #[test]
    fn saddle_rejects_edge() {
        assert!(matches!(saddle_data(2.0), Err(Error::OutsideBulk(_))));
        assert!(saddle_data(-2.5).is_err());
        assert!(scaled_lambdas(2.0, 0.0, 0.0, 10).is_err());
    }

    #[test]
    fn f_singularity() {
        assert!(f(Complex::new(0.0, 0.5), 1.0).is_err());
        assert!(f(Complex::new(0.1, 0.5), 1.0).is_ok());
    }

    #[test]
    fn f_star_matches_real_part_of_f() {
        for &l0 in &[0.0, 0.7, 1.6] {
            let s = saddle_data(l0).unwrap();
            let fa = f(Complex::new(s.a_plus, 0.0), l0).unwrap();
            for &x in &[-3.0, -0.4, 0.3, 2.2] {
                let fx = f(Complex::new(x, 0.0), l0).unwrap();
                assert_relative_eq!(f_star(x, l0), (fx - fa).re, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn sine_kernel_values() {
        assert_eq!(sine_kernel(0.0), 1.0);
        assert!(sine_kernel(1.0f64).abs() < 1e-16);
        assert_relative_eq!(sine_kernel(0.5), 2.0 / PI, epsilon = 1e-15);
        // both sides of the series switch agree
        let a = sine_kernel(0.9999999e-4 / PI);
        let b = sine_kernel(1.0000001e-4 / PI);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn unfolding() {
        let p = scaled_lambdas(0.0, 0.0, 0.0, 5).unwrap();
        assert_eq!((p.lambda1, p.lambda2), (0.0, 0.0));
        let p = scaled_lambdas(0.0, 1.0, 0.0, 100).unwrap();
        assert_relative_eq!(p.lambda1, PI / 100.0, epsilon = 1e-15);
        let q = scaled_lambdas(0.0, 1.1, 0.0, 100).unwrap();
        assert!(q.lambda1 > p.lambda1);
        assert_eq!(p.swapped().lambda2, p.lambda1);
    }
}
