use bandmoment_core::charpoly::count_below;
use bandmoment_core::lattice::*;
use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type C = Complex<f64>;

/// Dense `-Δ + x` with the given boundary diagonals.
fn dense_shifted(m: usize, first: f64, last: f64, x: C) -> DMatrix<C> {
    DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            let d = if m == 1 {
                first.min(last)
            } else if i == 0 {
                first
            } else if i == m - 1 {
                last
            } else {
                2.0
            };
            C::new(d, 0.0) + x
        } else if i.abs_diff(j) == 1 {
            C::new(-1.0, 0.0)
        } else {
            C::new(0.0, 0.0)
        }
    })
}

fn random_points(rng: &mut ChaCha8Rng) -> Vec<C> {
    let mut xs: Vec<C> = (0..20)
        .map(|_| C::new(rng.random_range(0.05..4.0), 0.0))
        .collect();
    xs.extend((0..20).map(|_| C::new(rng.random_range(-4.0..4.0), rng.random_range(0.1..2.0))));
    xs
}

fn rel(a: C, b: C) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn recurrences_match_dense_determinants() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let xs = random_points(&mut rng);
    for m in 1..=12 {
        for &x in &xs {
            // T_m: one Dirichlet-like end (diag 2), one Neumann end (diag 1).
            let t_dense = dense_shifted(m, 2.0, 1.0, x).determinant();
            assert!(rel(char_poly_t(m, x), t_dense) < 1e-10, "T_{m}({x})");
            let s_dense = if m == 1 {
                x
            } else {
                dense_shifted(m, 1.0, 1.0, x).determinant()
            };
            assert!(rel(char_poly_s(m, x), s_dense) < 1e-10, "S_{m}({x})");
        }
    }
}

#[test]
fn closed_forms_match_recurrences() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for x in random_points(&mut rng) {
        for m in 1..=40 {
            assert!(rel(char_poly_t_closed(m, x), char_poly_t(m, x)) < 1e-10, "T_{m}({x})");
            assert!(rel(char_poly_s_closed(m, x), char_poly_s(m, x)) < 1e-10, "S_{m}({x})");
        }
    }
}

fn dense_green(m: usize, gamma: C, w: f64) -> DMatrix<C> {
    let x = gamma * 2.0 / (w * w);
    let mat = if m == 1 {
        DMatrix::from_element(1, 1, x)
    } else {
        dense_shifted(m, 1.0, 1.0, x)
    };
    mat.try_inverse().unwrap()
}

#[test]
fn green_entries_match_dense_inverse() {
    let gamma = C::new(1.0, 0.5);
    let inv = dense_green(10, gamma, 3.0);
    for i in 1..=10 {
        let g = green_entry(10, gamma, 3.0, i).unwrap();
        assert!(rel(g, inv[(i - 1, i - 1)]) < 1e-8, "i={i}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..20 {
        let m = rng.random_range(1..=15);
        let gamma = C::new(rng.random_range(0.1..3.0), rng.random_range(-2.0..2.0));
        let w = rng.random_range(0.5..5.0);
        let inv = dense_green(m, gamma, w);
        for i in 1..=m {
            let g = green_entry(m, gamma, w, i).unwrap();
            assert!(rel(g, inv[(i - 1, i - 1)]) < 1e-8);
        }
    }
}

#[test]
fn cofactor_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for m in 2..=8 {
        for _ in 0..5 {
            let x = C::new(rng.random_range(0.1..3.0), rng.random_range(-1.0..1.0));
            let gamma = x * 0.5; // W = 1
            let full = dense_shifted(m, 1.0, 1.0, x);
            for i in 1..=m {
                let minor = full.clone().remove_row(i - 1).remove_column(i - 1);
                let lhs = green_entry(m, gamma, 1.0, i).unwrap() * full.determinant();
                assert!(rel(lhs, minor.determinant()) < 1e-10);
            }
        }
    }
}

#[test]
fn partition_matches_direct_integration() {
    // m = 3 sites, trapezoid rule on [-12, 12]^3 with step 0.25.
    let (m, gamma, w) = (3, C::new(1.0, 1.0), 2.0);
    let g = gamma / (w * w);
    let h = 0.25;
    let nodes: Vec<f64> = (-48..=48).map(|k| k as f64 * h).collect();
    let mut z = C::new(0.0, 0.0);
    for &a in &nodes {
        for &b in &nodes {
            for &c in &nodes {
                let kinetic = 0.5 * ((b - a).powi(2) + (c - b).powi(2));
                let mass = g * (a * a + b * b + c * c);
                z += (-(mass + kinetic)).exp();
            }
        }
    }
    z *= h * h * h;
    let log_z = gaussian_partition(m, gamma, w).unwrap();
    assert!(rel(log_z.exp(), z) < 1e-6, "{} vs {z}", log_z.exp());
}

#[test]
fn partition_branch_is_continuous() {
    // Path from real gamma to a strongly rotated one; Re gamma stays positive.
    let (m, w) = (60, 2.0);
    let steps = 400;
    let mut prev: Option<C> = None;
    for k in 0..=steps {
        let t = k as f64 / steps as f64;
        let gamma = C::new(1.0 - 0.95 * t, 6.0 * t);
        let log_z = gaussian_partition(m, gamma, w).unwrap();
        if let Some(p) = prev {
            assert!((log_z.im - p.im).abs() < std::f64::consts::PI, "jump at t={t}");
        }
        // same point on the principal sheet
        let direct = C::new((2.0 * std::f64::consts::PI).ln() * m as f64 / 2.0, 0.0)
            - char_poly_s(m, gamma * 2.0 / (w * w)).ln() * 0.5;
        let diff = log_z - direct;
        assert!(diff.re.abs() < 1e-9);
        let turns = diff.im / std::f64::consts::PI;
        assert!((turns - turns.round()).abs() < 1e-9);
        prev = Some(log_z);
    }
}

#[test]
fn covariance_profile_properties() {
    for &(n, w) in &[(1usize, 1.0), (3, 1.0), (17, 2.5), (64, 64.0), (201, 10.0)] {
        let lat = Lattice1D::with_sites(n).unwrap();
        let j = covariance_profile(lat, w).unwrap();
        for i in 0..n {
            let s: f64 = j.row(i).iter().sum();
            assert!((s - 1.0).abs() < 1e-12, "row sum {s}");
            for k in 0..n {
                assert_eq!(j.get(i, k), j.get(k, i));
            }
        }
        // W^2 (-Δ) + I has no eigenvalue at or below zero.
        let precision = neumann_laplacian::<f64>(lat).scaled_shifted(w * w, 1.0);
        assert_eq!(count_below(&precision, 0.0), 0);
        assert_eq!(count_below(&precision, 1e-300), 0);
    }
}

#[test]
fn covariance_matches_dense_inverse() {
    let (n, w) = (25, 3.0);
    let lat = Lattice1D::with_sites(n).unwrap();
    let j = covariance_profile(lat, w).unwrap();
    let lap = neumann_laplacian::<f64>(lat);
    let dense = DMatrix::from_fn(n, n, |a, b| {
        let mut v = 0.0;
        if a == b {
            v = w * w * lap.diag()[a] + 1.0;
        } else if a.abs_diff(b) == 1 {
            v = w * w * lap.off()[a.min(b)];
        }
        v
    });
    let inv = dense.try_inverse().unwrap();
    for a in 0..n {
        for b in 0..n {
            assert!((inv[(a, b)] - j.get(a, b)).abs() < 1e-12);
        }
    }
}
