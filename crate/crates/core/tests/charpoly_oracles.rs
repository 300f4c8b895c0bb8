use bandmoment_core::charpoly::*;
use bandmoment_core::lattice::{covariance_profile, Lattice1D};
use bandmoment_core::sampler::{sample_gue, sample_rbm, HermitianMatrix, RngStream};
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn to_dense(h: &HermitianMatrix<f64>) -> DMatrix<Complex<f64>> {
    let n = h.dim();
    DMatrix::from_fn(n, n, |i, j| h.get(i, j))
}

fn band_sample(n: usize, w: f64, idx: u64) -> HermitianMatrix<f64> {
    let p = covariance_profile(Lattice1D::with_sites(n).unwrap(), w).unwrap();
    sample_rbm(&p, RngStream::new(77, idx))
}

#[test]
fn tridiagonal_form_preserves_invariants() {
    for idx in 0..10 {
        let h = if idx % 2 == 0 {
            band_sample(50, 4.0, idx)
        } else {
            sample_gue(50, RngStream::new(5, idx))
        };
        let t = tridiagonalize(&h);
        let trace: f64 = t.diag().iter().sum();
        assert!((trace - h.trace()).abs() < 1e-10);
        let frob: f64 = t.diag().iter().map(|d| d * d).sum::<f64>()
            + 2.0 * t.off().iter().map(|e| e * e).sum::<f64>();
        assert!((frob - h.frobenius_sq()).abs() < 1e-8);
        assert!(t.off().iter().all(|&e| e >= 0.0));
    }
}

#[test]
fn tridiagonal_form_keeps_spectrum() {
    let h = sample_gue(20, RngStream::new(9, 0));
    let mut direct: Vec<f64> = to_dense(&h).symmetric_eigenvalues().iter().copied().collect();
    direct.sort_by(f64::total_cmp);
    let bisected = eigenvalues_bisection(&tridiagonalize(&h));
    for (a, b) in direct.iter().zip(&bisected) {
        assert!((a - b).abs() < 1e-10, "{a} vs {b}");
    }
}

#[test]
fn determinant_matches_eigenvalue_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(30);
    for idx in 0..5 {
        let h = band_sample(30, 3.0, idx);
        let eig = to_dense(&h).symmetric_eigenvalues();
        let t = tridiagonalize(&h);
        for _ in 0..10 {
            let lambda: f64 = rng.random_range(-2.5..2.5);
            let d = char_det(&t, lambda);
            let log_mag: f64 = eig.iter().map(|mu| (lambda - mu).abs().ln()).sum();
            let negatives = eig.iter().filter(|&&mu| lambda - mu < 0.0).count();
            let sign = if negatives % 2 == 0 { 1 } else { -1 };
            assert_eq!(d.sign, sign);
            assert!(((d.log_mag - log_mag) / log_mag.abs().max(1.0)).abs() < 1e-6);
        }
    }
}

#[test]
fn counts_match_sorted_eigenvalues() {
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    for idx in 0..4 {
        let h = sample_gue(40, RngStream::new(40, idx));
        let eig = to_dense(&h).symmetric_eigenvalues();
        let t = tridiagonalize(&h);
        let mut prev = 0;
        let mut lambdas: Vec<f64> = (0..25).map(|_| rng.random_range(-2.5..2.5)).collect();
        lambdas.sort_by(f64::total_cmp);
        for lambda in lambdas {
            let expected = eig.iter().filter(|&&mu| mu < lambda).count();
            let c = count_below(&t, lambda);
            assert_eq!(c, expected, "lambda={lambda}");
            assert!(c >= prev);
            prev = c;
        }
    }
}

#[test]
fn sign_follows_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for idx in 0..10 {
        let t = tridiagonalize(&band_sample(25, 2.0, 100 + idx));
        for _ in 0..50 {
            let lambda: f64 = rng.random_range(-3.0..3.0);
            let d = char_det(&t, lambda);
            let above = t.dim() - count_below(&t, lambda);
            let expected = if above % 2 == 0 { 1 } else { -1 };
            assert_eq!(d.sign, expected, "lambda={lambda}");
        }
    }
}

#[test]
fn large_matrix_determinants_stay_finite() {
    let h = sample_gue(600, RngStream::new(1, 1));
    let t = tridiagonalize(&h);
    for lambda in [-2.5f64, -1.0, 0.0, 0.37, 1.9, 3.0] {
        assert!(char_det(&t, lambda).log_mag.is_finite());
    }
    let (lo, hi) = t.gershgorin_bounds();
    assert_eq!(count_below(&t, lo - 1e-9), 0);
    assert_eq!(count_below(&t, hi + 1e-9), 600);
}
