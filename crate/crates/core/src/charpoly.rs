//! Characteristic polynomial and eigenvalue counting for Hermitian matrices.
//!
//! A matrix is reduced once to a real symmetric tridiagonal form by
//! Householder reflections (`O(N^3)`); after that each `det(λ - H)` and each
//! Sturm count costs `O(N)`.

use num_complex::Complex;

use crate::hermitian::HermitianMatrix;
use crate::lattice::TridiagonalSymmetric;
use crate::scalar::Real;
use crate::signed_log::SignedLog;

/// Unitary reduction of `h` to a real symmetric tridiagonal matrix with
/// nonnegative off-diagonal.
pub fn tridiagonalize<T: Real>(h: &HermitianMatrix<T>) -> TridiagonalSymmetric<T> {
    let n = h.dim();
    let zero = Complex::new(T::zero(), T::zero());
    if n == 0 {
        panic!("cannot tridiagonalize an empty matrix");
    }
    let mut a: Vec<Complex<T>> = h.as_slice().to_vec();
    let mut sub = vec![zero; n.saturating_sub(1)];
    let mut v = vec![zero; n];
    let mut p = vec![zero; n];
    let two = T::lit(2.0);

    for k in 0..n.saturating_sub(1) {
        let m = n - k - 1;
        let x0 = a[(k + 1) * n + k];
        let tail: T = (k + 2..n).fold(T::zero(), |acc, i| acc + a[i * n + k].norm_sqr());
        if tail == T::zero() {
            sub[k] = x0;
            continue;
        }
        let norm = (x0.norm_sqr() + tail).sqrt();
        let phase = if x0.norm() == T::zero() {
            Complex::new(T::one(), T::zero())
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        v[0] = x0 - alpha;
        for i in 1..m {
            v[i] = a[(k + 1 + i) * n + k];
        }
        let vnorm = (v[0].norm_sqr() + tail).sqrt();
        for vi in v.iter_mut().take(m) {
            *vi = *vi / vnorm;
        }

        // p = B v over the trailing block B = a[k+1.., k+1..].
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let mut acc = zero;
            for (bij, vj) in row.iter().zip(&v[..m]) {
                acc = acc + bij * vj;
            }
            p[i] = acc;
        }
        let kappa = (0..m).fold(zero, |acc, i| acc + v[i].conj() * p[i]).re;
        // w = 2p - 2κ v, stored in p.
        for i in 0..m {
            p[i] = p[i] * two - v[i] * (two * kappa);
        }
        for i in 0..m {
            let vi = v[i];
            let wi = p[i];
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for j in 0..m {
                row[j] = row[j] - vi * p[j].conj() - wi * v[j].conj();
            }
        }
        sub[k] = alpha;
    }

    let diag = (0..n).map(|i| a[i * n + i].re).collect();
    let off = sub.iter().map(|z| z.norm()).collect();
    TridiagonalSymmetric::new(diag, off).expect("consistent lengths")
}

const RESCALE_HI: f64 = 1e150;
const RESCALE_LO: f64 = 1e-150;

/// `det(λ I - T)` by the three-term recurrence, renormalised whenever the
/// iterates leave `[1e-150, 1e150]`.
pub fn char_det<T: Real>(t: &TridiagonalSymmetric<T>, lambda: T) -> SignedLog<T> {
    let d = t.diag();
    let e = t.off();
    let hi = T::lit(RESCALE_HI);
    let lo = T::lit(RESCALE_LO);

    let mut log_scale = T::zero();
    let mut prev = T::one();
    let mut cur = lambda - d[0];
    for k in 1..d.len() {
        let next = (lambda - d[k]) * cur - e[k - 1] * e[k - 1] * prev;
        prev = cur;
        cur = next;
        let mag = cur.abs().max(prev.abs());
        if mag > hi || (mag < lo && mag > T::zero()) {
            prev = prev / mag;
            cur = cur / mag;
            log_scale = log_scale + mag.ln();
        }
    }
    if cur == T::zero() {
        return SignedLog::zero();
    }
    SignedLog::new(if cur > T::zero() { 1 } else { -1 }, log_scale + cur.abs().ln())
}

/// Evaluates `det(λ_k I - T)` for several `λ_k`.
pub fn char_det_many<T: Real>(t: &TridiagonalSymmetric<T>, lambdas: &[T]) -> Vec<SignedLog<T>> {
    lambdas.iter().map(|&l| char_det(t, l)).collect()
}

/// Number of eigenvalues strictly below `λ` (negative LDLᵀ pivots of `T - λ`).
/// A vanishing pivot is replaced by `+pivmin`, i.e. counted as not below.
pub fn count_below<T: Real>(t: &TridiagonalSymmetric<T>, lambda: T) -> usize {
    let d = t.diag();
    let e = t.off();
    let emax = e.iter().fold(T::zero(), |acc, &x| acc.max(x * x));
    let pivmin = T::min_positive_value() * emax.max(T::one());

    let mut count = 0;
    let mut q = d[0] - lambda;
    for k in 0..d.len() {
        if k > 0 {
            q = (d[k] - lambda) - e[k - 1] * e[k - 1] / q;
        }
        if q.abs() < pivmin {
            q = if q < T::zero() { -pivmin } else { pivmin };
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

/// All eigenvalues in ascending order, by bisection on [`count_below`].
pub fn eigenvalues_bisection<T: Real>(t: &TridiagonalSymmetric<T>) -> Vec<T> {
    let n = t.dim();
    let (lo, hi) = t.gershgorin_bounds();
    let pad = (hi - lo).abs().max(T::one()) * T::epsilon();
    let (lo, hi) = (lo - pad, hi + pad);
    let half = T::lit(0.5);
    (0..n)
        .map(|k| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = half * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if count_below(t, mid) <= k {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            half * (a + b)
        })
        .collect()
}
