//! Haar measure on U(2), the 2x2 Harish-Chandra–Itzykson–Zuber integral and
//! the moments `∫ |V₁₂|^{2s} e^{t(Tr CV*DV - Tr CD)} dμ(V)`.

use num_complex::Complex;
use rand_distr::{Distribution, StandardNormal};

use crate::sampler::RngStream;
use crate::scalar::Real;

/// 2x2 unitary matrix, row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unitary2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Unitary2<T> {
    /// `max |(U*U - I)_ij|`.
    pub fn unitarity_defect(&self) -> T {
        let m = &self.m;
        let mut worst = T::zero();
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = m[0][i].conj() * m[0][j] + m[1][i].conj() * m[1][j];
                if i == j {
                    acc = acc - T::one();
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    /// `Tr C U* D U` for `C = diag(c)`, `D = diag(d)`.
    pub fn trace_form(&self, c: [T; 2], d: [T; 2]) -> T {
        let mut acc = T::zero();
        for (i, &ci) in c.iter().enumerate() {
            for (j, &dj) in d.iter().enumerate() {
                acc = acc + ci * dj * self.m[j][i].norm_sqr();
            }
        }
        acc
    }

    /// `Tr(A U)` for a fixed 2x2 matrix `A`.
    pub fn trace_product(&self, a: &[[Complex<T>; 2]; 2]) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..2 {
            for k in 0..2 {
                acc = acc + a[i][k] * self.m[k][i];
            }
        }
        acc
    }

    /// Left multiplication `A U` by another unitary.
    pub fn left_mul(&self, a: &Unitary2<T>) -> Unitary2<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = [[zero; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a.m[i][0] * self.m[0][j] + a.m[i][1] * self.m[1][j];
            }
        }
        Unitary2 { m: out }
    }
}

/// Haar-distributed U(2) element: QR of a complex Ginibre matrix with the
/// diagonal of `R` made positive.
pub fn haar_u2<T>(stream: RngStream) -> Unitary2<T>
where
    T: Real,
    StandardNormal: Distribution<T>,
{
    let mut rng = stream.rng();
    let mut draw = || {
        let re: T = StandardNormal.sample(&mut rng);
        let im: T = StandardNormal.sample(&mut rng);
        Complex::new(re, im)
    };
    let z = [[draw(), draw()], [draw(), draw()]];
    let col0 = [z[0][0], z[1][0]];
    let col1 = [z[0][1], z[1][1]];
    let n0 = (col0[0].norm_sqr() + col0[1].norm_sqr()).sqrt();
    let q0 = [col0[0] / n0, col0[1] / n0];
    let proj = q0[0].conj() * col1[0] + q0[1].conj() * col1[1];
    let r1 = [col1[0] - q0[0] * proj, col1[1] - q0[1] * proj];
    let n1 = (r1[0].norm_sqr() + r1[1].norm_sqr()).sqrt();
    let q1 = [r1[0] / n1, r1[1] / n1];
    Unitary2 {
        m: [[q0[0], q1[0]], [q0[1], q1[1]]],
    }
}

const DEGENERATE: f64 = 1e-6;

/// `∫ exp{t Tr C U* D U} dμ(U)` over U(2) for `C = diag(c₁, c₂)`,
/// `D = diag(d₁, d₂)`:
/// `(e^{t(c₁d₁+c₂d₂)} - e^{t(c₁d₂+c₂d₁)}) / (t (c₁-c₂)(d₁-d₂))`.
pub fn hciz_2x2<T: Real>(c1: T, c2: T, d1: T, d2: T, t: T) -> T {
    let x = t * (c1 - c2) * (d1 - d2);
    let base = (t * (c1 * d2 + c2 * d1)).exp();
    let ratio = if x.abs() < T::lit(DEGENERATE) {
        // (e^x - 1)/x
        T::one() + x / T::lit(2.0) + x * x / T::lit(6.0) + x * x * x / T::lit(24.0)
    } else {
        x.exp_m1() / x
    };
    base * ratio
}

const SERIES_RADIUS: f64 = 8.0;

/// `h_s(x) = (-1)^s (d/dx)^s (1 - e^{-x})/x = ∫₀¹ u^s e^{-xu} du`.
///
/// Taylor series for `x <= 8`, closed form above.
pub fn v12_moment<T: Real>(s: u32, x: T) -> T {
    if x > T::lit(SERIES_RADIUS) {
        v12_moment_closed(s, x)
    } else {
        v12_moment_series(s, x)
    }
}

/// `Σ_k (-x)^k / (k! (k + s + 1))`. All terms are positive for `x < 0`.
pub fn v12_moment_series<T: Real>(s: u32, x: T) -> T {
    let mut power = T::one(); // (-x)^k / k!
    let mut sum = T::zero();
    let tol = T::lit(1e-16);
    for k in 0..10_000u32 {
        let term = power / T::from_u32(k + s + 1).unwrap();
        sum = sum + term;
        if T::from_u32(k).unwrap() > x.abs() && term.abs() <= tol * sum.abs() {
            break;
        }
        power = power * (-x) / T::from_u32(k + 1).unwrap();
    }
    sum
}

/// `s!/x^{s+1} · (1 - e^{-x} Σ_{j<=s} x^j/j!)`.
///
/// For `x > 0` the bracket is a Poisson tail probability and is summed
/// without cancellation; for `x < 0` it is evaluated as written.
pub fn v12_moment_closed<T: Real>(s: u32, x: T) -> T {
    let mut fact = T::one();
    for j in 1..=s {
        fact = fact * T::from_u32(j).unwrap();
    }
    let prefactor = fact / x.powi(s as i32 + 1);
    let sf = T::from_u32(s).unwrap();
    let bracket = if x > T::zero() && x <= sf + T::one() {
        // e^{-x} Σ_{j>s} x^j / j!
        let mut term = (-x).exp();
        for j in 1..=s {
            term = term * x / T::from_u32(j).unwrap();
        }
        let mut sum = T::zero();
        let mut j = s + 1;
        loop {
            term = term * x / T::from_u32(j).unwrap();
            sum = sum + term;
            if term <= T::lit(1e-17) * sum {
                break;
            }
            j += 1;
        }
        sum
    } else {
        let mut term = T::one();
        let mut head = T::one();
        for j in 1..=s {
            term = term * x / T::from_u32(j).unwrap();
            head = head + term;
        }
        T::one() - (-x).exp() * head
    };
    prefactor * bracket
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn haar_samples_are_unitary() {
        for k in 0..10_000 {
            let u: Unitary2<f64> = haar_u2(RngStream::new(3, k));
            assert!(u.unitarity_defect() <= 1e-12);
        }
    }

    #[test]
    fn hciz_limits() {
        assert_relative_eq!(hciz_2x2(1.0, -0.5, 2.0, 0.3, 0.0), 1.0);
        assert_relative_eq!(hciz_2x2(1.0, -0.5, 2.0, 0.3, 1e-9), 1.0, epsilon = 1e-8);
        let (c, d1, d2, t): (f64, f64, f64, f64) = (0.7, 1.3, -0.4, 0.9);
        assert_relative_eq!(
            hciz_2x2(c, c, d1, d2, t),
            (t * c * (d1 + d2)).exp(),
            epsilon = 1e-14
        );
    }

    #[test]
    fn hciz_continuous_across_threshold() {
        let (c1, d1, d2, t): (f64, f64, f64, f64) = (0.2, 1.0, 0.0, 1.0);
        // x = t(c1 - c2)(d1 - d2) on either side of the series switch
        let below = hciz_2x2(c1, c1 - 0.9999999e-6, d1, d2, t);
        let above = hciz_2x2(c1, c1 - 1.0000001e-6, d1, d2, t);
        assert!((below - above).abs() < 1e-12, "{below} {above}");
    }

    #[test]
    fn hciz_swap_both_pairs() {
        let v = hciz_2x2(0.3, -1.2, 0.8, 2.0, 1.7);
        let w = hciz_2x2(-1.2, 0.3, 2.0, 0.8, 1.7);
        assert_relative_eq!(v, w, max_relative = 1e-14);
    }

    #[test]
    fn moment_at_zero() {
        for s in 0..=6 {
            assert_relative_eq!(v12_moment(s, 0.0), 1.0 / (s as f64 + 1.0), epsilon = 1e-15);
        }
    }

    #[test]
    fn moment_zero_is_elementary() {
        for &x in &[-20.0, -3.0, 0.5, 4.0, 12.0, 40.0] {
            let exact = -(-x as f64).exp_m1() / x;
            assert_relative_eq!(v12_moment(0, x), exact, max_relative = 1e-13);
        }
    }

    #[test]
    fn branches_agree_at_crossover() {
        for s in 0..=30 {
            let a: f64 = v12_moment_series(s, 8.0);
            let b = v12_moment_closed(s, 8.0);
            assert!(((a - b) / b).abs() < 1e-9, "s={s}: {a} vs {b}");
        }
        for s in 0..=10 {
            let a: f64 = v12_moment_series(s, -8.0);
            let b = v12_moment_closed(s, -8.0);
            assert!(((a - b) / b).abs() < 1e-9, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn moments_positive_and_decreasing() {
        for s in 0..=10 {
            let mut prev = f64::INFINITY;
            for k in 0..=500 {
                let x = k as f64 * 0.1;
                let h = v12_moment(s, x);
                assert!(h > 0.0);
                assert!(h < prev, "s={s} x={x}");
                prev = h;
            }
        }
    }

    #[test]
    fn moment_recurrence() {
        // Integration by parts: x h_s = s h_{s-1} - e^{-x}.
        for &x in &[-12.0, -2.0, 0.7, 5.0, 9.5, 30.0] {
            for s in 1..=12u32 {
                let lhs = x * v12_moment(s, x);
                let rhs = s as f64 * v12_moment(s - 1, x) - (-x as f64).exp();
                assert!((lhs - rhs).abs() <= 1e-10 * rhs.abs().max(1.0), "x={x} s={s}");
            }
        }
    }
}
