use bandmoment_core::dualrep::*;
use bandmoment_core::lattice::{covariance_profile, Lattice1D};
use bandmoment_core::moments::wick_exact_f2;
use bandmoment_core::quadrature::QuadratureGrid;
use bandmoment_core::saddle::scaled_lambdas;

fn oracle(n: usize, w: f64, l0: f64, xi1: f64, xi2: f64) -> f64 {
    let p = scaled_lambdas(l0, xi1, xi2, n).unwrap();
    let prof = covariance_profile(Lattice1D::with_sites(n).unwrap(), w).unwrap();
    wick_exact_f2(p.lambda1, p.lambda2, &prof).unwrap()
}

#[test]
fn single_site_identity_on_parameter_grid() {
    let grid = QuadratureGrid::gauss_hermite(40).unwrap();
    let xis = [(0.0, 0.0), (0.5, -0.5), (0.3, -0.2), (1.0, 0.25)];
    for &l0 in &[0.0, 0.5, 1.0] {
        for &(x1, x2) in &xis {
            let v = dual_f2_n1(l0, x1, x2, &grid).unwrap();
            let exact = oracle(1, 1.0, l0, x1, x2);
            assert!(((v.re - exact) / exact).abs() < 1e-6, "λ0={l0} ξ=({x1},{x2}): {v} vs {exact}");
            assert!(v.im.abs() <= 1e-8 * v.re.abs().max(1.0));
        }
    }
}

#[test]
fn quadrature_converged_across_node_counts() {
    let grids: Vec<_> = [32, 40, 48]
        .iter()
        .map(|&n| QuadratureGrid::gauss_hermite(n).unwrap())
        .collect();
    for &(l0, x1, x2) in &[(0.0, 0.5, -0.5), (1.0, 0.3, -0.2), (0.5, 1.0, 0.25)] {
        let vals: Vec<_> = grids.iter().map(|g| dual_f2_n1(l0, x1, x2, g).unwrap()).collect();
        for w in vals.windows(2) {
            assert!((w[0] - w[1]).norm() < 1e-8);
        }
    }
}

#[test]
fn two_site_monte_carlo_matches_wick() {
    let (l0, x1, x2, w) = (0.0, 0.2, -0.1, 1.0);
    let exact = oracle(2, w, l0, x1, x2);
    let a = dual_f2_n2_mc(l0, x1, x2, w, 400_000, 1).unwrap();
    assert!((a.value.re - exact).abs() <= 4.0 * a.stderr_re, "{} ± {} vs {exact}", a.value, a.stderr_re);
    assert!(a.value.im.abs() <= 4.0 * a.stderr_im);
    // A literal leading minus (correct only for odd N) would be far off.
    assert!((-a.value.re - exact).abs() > 50.0 * a.stderr_re);
    let b = dual_f2_n2_mc(l0, x1, x2, w, 400_000, 2).unwrap();
    let combined = (a.stderr_re.powi(2) + b.stderr_re.powi(2)).sqrt();
    assert!((a.value.re - b.value.re).abs() <= 4.0 * combined);
}

#[test]
fn three_site_monte_carlo_matches_wick() {
    let (l0, x1, x2, w) = (0.5, 0.3, 0.0, 1.5);
    let exact = oracle(3, w, l0, x1, x2);
    let a = dual_f2_mc(l0, x1, x2, 3, w, 400_000, 9).unwrap();
    assert!((a.value.re - exact).abs() <= 4.0 * a.stderr_re, "{} ± {} vs {exact}", a.value, a.stderr_re);
}
