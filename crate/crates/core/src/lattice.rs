//! One-dimensional lattice: Neumann Laplacian, band covariance profile and the
//! tridiagonal determinant toolkit built on the `T_m` / `S_m` recurrences.
//!
//! Sites are stored `0..N`; the symmetric labelling `-n..=n` with `N = 2n + 1`
//! is available through [`Lattice1D::symmetric`].

use num_complex::Complex;
use num_traits::{Num, One};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Chain of `N >= 1` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Lattice1D {
    sites: usize,
}

impl Lattice1D {
    /// The segment `[-n, n]`, i.e. `N = 2n + 1` sites.
    pub fn symmetric(half_width: usize) -> Self {
        Self {
            sites: 2 * half_width + 1,
        }
    }

    /// A chain with an arbitrary number of sites (even sizes included).
    pub fn with_sites(sites: usize) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidArgument("lattice needs at least one site".into()));
        }
        Ok(Self { sites })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    /// `Some(n)` when the chain is the symmetric segment `[-n, n]`.
    pub fn half_width(&self) -> Option<usize> {
        (self.sites % 2 == 1).then_some(self.sites / 2)
    }
}

/// Real symmetric tridiagonal matrix stored as its diagonal and first
/// off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalSymmetric<T> {
    diag: Vec<T>,
    off: Vec<T>,
}

impl<T: Real> TridiagonalSymmetric<T> {
    pub fn new(diag: Vec<T>, off: Vec<T>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::InvalidArgument("empty tridiagonal matrix".into()));
        }
        if off.len() + 1 != diag.len() {
            return Err(Error::InvalidArgument(format!(
                "off-diagonal length {} does not match dimension {}",
                off.len(),
                diag.len()
            )));
        }
        Ok(Self { diag, off })
    }

    pub fn from_diagonal(diag: Vec<T>) -> Result<Self> {
        let off = vec![T::zero(); diag.len().saturating_sub(1)];
        Self::new(diag, off)
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn off(&self) -> &[T] {
        &self.off
    }

    /// `alpha * self + beta * I`.
    pub fn scaled_shifted(&self, alpha: T, beta: T) -> Self {
        Self {
            diag: self.diag.iter().map(|&d| alpha * d + beta).collect(),
            off: self.off.iter().map(|&e| alpha * e).collect(),
        }
    }

    /// Interval `[lo, hi]` containing the spectrum.
    pub fn gershgorin_bounds(&self) -> (T, T) {
        let n = self.dim();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { T::zero() };
            let right = if i + 1 < n { self.off[i].abs() } else { T::zero() };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[T]) -> Vec<T> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc = acc + self.off[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc = acc + self.off[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }

    /// Solves `self * x = rhs` by the Thomas algorithm (no pivoting).
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.dim();
        assert_eq!(rhs.len(), n);
        let mut c = vec![T::zero(); n];
        let mut y = vec![T::zero(); n];
        let mut pivot = self.diag[0];
        if pivot == T::zero() || !pivot.is_finite() {
            return Err(Error::SolverBreakdown { row: 0 });
        }
        y[0] = rhs[0] / pivot;
        for i in 1..n {
            c[i - 1] = self.off[i - 1] / pivot;
            pivot = self.diag[i] - self.off[i - 1] * c[i - 1];
            if pivot == T::zero() || !pivot.is_finite() {
                return Err(Error::SolverBreakdown { row: i });
            }
            y[i] = (rhs[i] - self.off[i - 1] * y[i - 1]) / pivot;
        }
        for i in (0..n - 1).rev() {
            y[i] = y[i] - c[i] * y[i + 1];
        }
        Ok(y)
    }
}

/// `-Δ` with Neumann boundary conditions: diagonal `[1, 2, ..., 2, 1]`,
/// off-diagonal `-1`. A single site gives the 1x1 zero matrix.
pub fn neumann_laplacian<T: Real>(lat: Lattice1D) -> TridiagonalSymmetric<T> {
    let n = lat.sites();
    let two = T::lit(2.0);
    let mut diag = vec![two; n];
    diag[0] = T::one();
    diag[n - 1] = T::one();
    if n == 1 {
        diag[0] = T::zero();
    }
    TridiagonalSymmetric {
        diag,
        off: vec![-T::one(); n - 1],
    }
}

/// Covariance profile `J = (W^2 (-Δ) + 1)^{-1}` of the band ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceProfile<T> {
    sites: usize,
    bandwidth: T,
    entries: Vec<T>,
}

impl<T: Real> CovarianceProfile<T> {
    /// Builds a profile from an explicit symmetric matrix (row-major).
    pub fn from_matrix(sites: usize, bandwidth: T, entries: Vec<T>) -> Result<Self> {
        if entries.len() != sites * sites || sites == 0 {
            return Err(Error::InvalidArgument("profile matrix has wrong shape".into()));
        }
        for i in 0..sites {
            for j in 0..i {
                if entries[i * sites + j] != entries[j * sites + i] {
                    return Err(Error::InvalidArgument("profile matrix is not symmetric".into()));
                }
            }
        }
        Ok(Self {
            sites,
            bandwidth,
            entries,
        })
    }

    /// Mean-field profile `J_ij = 1/N` (the GUE variance convention).
    pub fn mean_field(sites: usize) -> Self {
        let v = T::one() / T::from_count(sites);
        Self {
            sites,
            bandwidth: T::infinity(),
            entries: vec![v; sites * sites],
        }
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn bandwidth(&self) -> T {
        self.bandwidth
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.sites + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.sites..(i + 1) * self.sites]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }
}

/// `J = (W^2 (-Δ) + I)^{-1}`, one tridiagonal solve per column.
pub fn covariance_profile<T: Real>(lat: Lattice1D, bandwidth: T) -> Result<CovarianceProfile<T>> {
    if !(bandwidth > T::zero()) || !bandwidth.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be positive and finite, got {bandwidth}"
        )));
    }
    let n = lat.sites();
    let system = neumann_laplacian::<T>(lat).scaled_shifted(bandwidth * bandwidth, T::one());
    let mut entries = vec![T::zero(); n * n];
    let mut rhs = vec![T::zero(); n];
    for k in 0..n {
        rhs[k] = T::one();
        let col = system.solve(&rhs)?;
        rhs[k] = T::zero();
        for (i, v) in col.into_iter().enumerate() {
            entries[i * n + k] = v;
        }
    }
    let half = T::lit(0.5);
    for i in 0..n {
        for j in 0..i {
            let s = half * (entries[i * n + j] + entries[j * n + i]);
            entries[i * n + j] = s;
            entries[j * n + i] = s;
        }
    }
    Ok(CovarianceProfile {
        sites: n,
        bandwidth,
        entries,
    })
}

/// `T_m(x) = det(-Δ_1 + x)` where `-Δ_1` is the Neumann Laplacian with the
/// first boundary entry raised to 2. `T_0 = 1`.
pub fn char_poly_t<S: Num + Copy>(m: usize, x: S) -> S {
    let two = S::one() + S::one();
    let mut prev = S::one(); // T_{-1}
    let mut cur = S::one(); // T_0
    for _ in 0..m {
        let next = (two + x) * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `S_m(x) = det(-Δ + x)` for the `m`-site Neumann Laplacian, `S_1(x) = x`.
pub fn char_poly_s<S: Num + Copy>(m: usize, x: S) -> S {
    match m {
        0 => S::one(),
        1 => x,
        _ => (S::one() + x) * char_poly_t(m - 1, x) - char_poly_t(m - 2, x),
    }
}

fn zeta<T: Real>(x: Complex<T>) -> Complex<T> {
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    (x + two + (x * x + x * four).sqrt()) / two
}

/// Closed form of `T_m` through `ζ = (2 + x + sqrt(x^2 + 4x)) / 2`.
pub fn char_poly_t_closed<T: Real>(m: usize, x: Complex<T>) -> Complex<T> {
    let z = zeta(x);
    let mi = m as i32;
    (z.powi(mi + 1) + z.powi(-mi)) / (z + T::one())
}

/// Closed form of `S_m` through `ζ`.
pub fn char_poly_s_closed<T: Real>(m: usize, x: Complex<T>) -> Complex<T> {
    let z = zeta(x);
    let mi = m as i32;
    (z.powi(mi) - z.powi(-mi)) * (z - T::one()) / (z + T::one())
}

fn check_gamma<T: Real>(gamma: Complex<T>, bandwidth: T) -> Result<Complex<T>> {
    if gamma.re == T::zero() && gamma.im == T::zero() {
        return Err(Error::Singular(
            "gamma = 0 hits the Neumann zero mode".into(),
        ));
    }
    if !(gamma.re > T::zero()) {
        return Err(Error::InvalidArgument(format!(
            "Re gamma must be positive, got {}",
            gamma.re
        )));
    }
    if !(bandwidth > T::zero()) {
        return Err(Error::InvalidArgument("bandwidth must be positive".into()));
    }
    Ok(gamma * (T::lit(2.0) / (bandwidth * bandwidth)))
}

/// Diagonal entry `(i, i)` (1-based) of `G = (-Δ + 2γ/W^2)^{-1}` on `m` sites.
pub fn green_entry<T: Real>(
    m: usize,
    gamma: Complex<T>,
    bandwidth: T,
    i: usize,
) -> Result<Complex<T>> {
    if i == 0 || i > m {
        return Err(Error::InvalidArgument(format!(
            "index {i} outside 1..={m}"
        )));
    }
    let x = check_gamma(gamma, bandwidth)?;
    Ok(char_poly_t(i - 1, x) * char_poly_t(m - i, x) / char_poly_s(m, x))
}

/// `log Z` for the complex Gaussian weight
/// `exp{-½ Σ (x_j - x_{j-1})^2 - γ/W^2 Σ x_j^2}` on `m` sites,
/// i.e. `(m/2) log 2π - ½ log S_m(2γ/W^2)`.
///
/// The branch of `log S_k` is followed continuously in `k`, and the
/// recurrence is rescaled so large `m` does not overflow.
pub fn gaussian_partition<T: Real>(m: usize, gamma: Complex<T>, bandwidth: T) -> Result<Complex<T>> {
    if m == 0 {
        return Err(Error::InvalidArgument("partition needs m >= 1".into()));
    }
    let x = check_gamma(gamma, bandwidth)?;
    let log_s = log_char_poly_s_continuous(m, x);
    let half = T::lit(0.5);
    let log_two_pi = (T::lit(2.0) * T::PI()).ln();
    Ok(Complex::new(T::from_count(m) * half * log_two_pi, T::zero()) - log_s * half)
}

/// `log S_m(x)` with the imaginary part tracked continuously from `S_1 = x`.
pub fn log_char_poly_s_continuous<T: Real>(m: usize, x: Complex<T>) -> Complex<T> {
    let one = Complex::<T>::one();
    let two = one + one;
    let big = T::lit(1e100);

    let mut log_scale = T::zero();
    // T_{k-2}, T_{k-1} in the current scale.
    let mut t_prev = one;
    let mut t_cur = one + x;
    let mut s_prev = x;
    let mut arg = x.arg();
    for _ in 2..=m {
        // S_k = (1 + x) T_{k-1} - T_{k-2}; then advance T.
        let t_next = (two + x) * t_cur - t_prev;
        let s_k = (one + x) * t_cur - t_prev;
        arg = arg + (s_k / s_prev).arg();
        s_prev = s_k;
        t_prev = t_cur;
        t_cur = t_next;
        let mag = t_cur.norm().max(t_prev.norm());
        if mag > big {
            let inv = T::one() / mag;
            t_prev = t_prev * inv;
            t_cur = t_cur * inv;
            s_prev = s_prev * inv;
            log_scale = log_scale + mag.ln();
        }
    }
    Complex::new(log_scale + s_prev.norm().ln(), arg)
}

/// Large-`m` form of `log Z`:
/// `(m/2) log 2π - ½ log( sqrt(2γ)/W · sinh(m sqrt(2γ)/W) )`.
pub fn gaussian_partition_sinh_asymptotic<T: Real>(
    m: usize,
    gamma: Complex<T>,
    bandwidth: T,
) -> Complex<T> {
    let root = (gamma * T::lit(2.0)).sqrt() / bandwidth;
    let half = T::lit(0.5);
    let log_two_pi = (T::lit(2.0) * T::PI()).ln();
    let arg = root * T::from_count(m);
    // log sinh z = z + log((1 - e^{-2z}) / 2), stable for large Re z.
    let log_sinh = arg + ((Complex::<T>::one() - (-arg * T::lit(2.0)).exp()) * half).ln();
    Complex::new(T::from_count(m) * half * log_two_pi, T::zero()) - (root.ln() + log_sinh) * half
}
