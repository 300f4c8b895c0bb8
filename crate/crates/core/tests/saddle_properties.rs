use bandmoment_core::saddle::*;
use num_complex::Complex;

const LAMBDAS: [f64; 4] = [0.0, 0.5, 1.0, 1.5];

#[test]
fn density_integrates_to_one() {
    // Substituting λ = 2 sin θ removes the square-root endpoints:
    // ∫ρ dλ = (2/π) ∫ cos²θ dθ over [-π/2, π/2]; composite Simpson.
    let n = 2000;
    let h = std::f64::consts::PI / n as f64;
    let g = |th: f64| semicircle_density(2.0 * th.sin()) * 2.0 * th.cos();
    let mut acc = g(-std::f64::consts::FRAC_PI_2) + g(std::f64::consts::FRAC_PI_2);
    for k in 1..n {
        let th = -std::f64::consts::FRAC_PI_2 + k as f64 * h;
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * g(th);
    }
    assert!((acc * h / 3.0 - 1.0).abs() < 1e-10);
    // the CDF is the antiderivative
    for k in 0..=40 {
        let l = -2.0 + 0.1 * k as f64;
        let eps = 1e-6;
        if l.abs() < 1.9 {
            let fd = (semicircle_cdf(l + eps) - semicircle_cdf(l - eps)) / (2.0 * eps);
            assert!((fd - semicircle_density(l)).abs() < 1e-8);
        }
    }
}

#[test]
fn saddle_points_are_stationary_minima() {
    for &l0 in &LAMBDAS {
        let s = saddle_data(l0).unwrap();
        for a in [s.a_plus, s.a_minus] {
            assert!(f_star(a, l0).abs() < 1e-12);
            let h = 1e-5;
            let d1 = (f_star(a + h, l0) - f_star(a - h, l0)) / (2.0 * h);
            assert!(d1.abs() < 1e-7);
        }
        assert!((s.a_plus - std::f64::consts::PI * s.rho).abs() < 1e-14);
    }
}

#[test]
fn quadratic_coefficient() {
    // f(a + h) = f(a) + c (h)^2 + O(h^3); the symmetric difference cancels
    // the cubic term.
    for &l0 in &LAMBDAS {
        let s = saddle_data(l0).unwrap();
        for (a, c) in [(s.a_plus, s.c_plus), (s.a_minus, s.c_minus)] {
            let h = 1e-3;
            let fa = f(Complex::new(a, 0.0), l0).unwrap();
            let fp = f(Complex::new(a + h, 0.0), l0).unwrap();
            let fm = f(Complex::new(a - h, 0.0), l0).unwrap();
            let coef = (fp + fm - fa * 2.0) / (2.0 * h * h);
            assert!((coef - c).norm() < 1e-4, "λ0={l0}: {coef} vs {c}");
        }
    }
}

#[test]
fn real_axis_lower_bounds_on_grid() {
    for &l0 in &[0.0, 1.0] {
        let s = saddle_data(l0).unwrap();
        let alpha = 0.5 * (1.0 - l0 * l0 / 4.0);
        // left and right quadratic lower bounds
        let delta = 0.01;
        for k in 0..10_000 {
            let x = -10.0 + (10.0 + delta) * k as f64 / 10_000.0;
            let fx = f_star(x, l0);
            assert!(fx >= alpha * (x - s.a_minus).powi(2), "x={x}");
            assert!(f_star(-x, l0) >= alpha * (-x - s.a_plus).powi(2));
        }
        // gap outside the δ-neighbourhoods
        let delta = 0.1;
        for k in 0..=10_000 {
            let x = -10.0 + 20.0 * k as f64 / 10_000.0;
            if (x - s.a_plus).abs() < delta || (x - s.a_minus).abs() < delta {
                continue;
            }
            assert!(f_star(x, l0) >= alpha * delta * delta, "x={x}");
        }
    }
}

#[test]
fn sine_kernel_shape() {
    for k in -50..=50 {
        let d = k as f64 * 0.173;
        assert_eq!(sine_kernel(d), sine_kernel(-d));
        assert!(sine_kernel(d).abs() <= 1.0);
    }
    for k in 1..10 {
        assert!(sine_kernel(k as f64).abs() < 1e-15);
    }
}
