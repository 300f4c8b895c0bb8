//! Self-check suites run by `bandmoment verify`. Every check carries the
//! measured value and what it was compared against, so the report doubles as
//! a record of the numbers.

use std::f64::consts::PI;
use std::fmt;

use bandmoment_core::charpoly::count_below;
use bandmoment_core::dualrep::{dual_f2_n1, dual_f2_n2_mc};
use bandmoment_core::lattice::*;
use bandmoment_core::moments::{mc_f2, wick_exact_f2, Ensemble, McOptions};
use bandmoment_core::quadrature::QuadratureGrid;
use bandmoment_core::saddle::*;
use bandmoment_core::sampler::RngStream;
use bandmoment_core::unitary::*;
use bandmoment_core::Result;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Suite {
    Lattice,
    Saddle,
    Unitary,
    Oracle,
    Dual,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Lattice, Suite::Saddle, Suite::Unitary, Suite::Oracle, Suite::Dual];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Lattice => "lattice",
            Suite::Saddle => "saddle",
            Suite::Unitary => "unitary",
            Suite::Oracle => "oracle",
            Suite::Dual => "dual",
            Suite::All => "all",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Expect {
    /// `|m - v| <= tol · |v|`
    Rel { value: f64, tol: f64 },
    /// `|m - v| <= tol`
    Abs { value: f64, tol: f64 },
    /// Statistical agreement, `|m - v| <= tol` with `tol` shown.
    Within { value: f64, tol: f64 },
    AtMost(f64),
    AtLeast(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub label: String,
    pub measured: f64,
    pub expect: Expect,
}

impl Check {
    pub fn new(label: impl Into<String>, measured: f64, expect: Expect) -> Self {
        Self {
            label: label.into(),
            measured,
            expect,
        }
    }

    pub fn passed(&self) -> bool {
        let m = self.measured;
        match self.expect {
            Expect::Rel { value, tol } => (m - value).abs() <= tol * value.abs(),
            Expect::Abs { value, tol } | Expect::Within { value, tol } => (m - value).abs() <= tol,
            Expect::AtMost(b) => m <= b,
            Expect::AtLeast(b) => m >= b,
        }
    }

    fn failed(label: impl Into<String>, err: impl fmt::Display) -> Self {
        Self::new(format!("{} [error: {err}]", label.into()), f64::NAN, Expect::AtMost(0.0))
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let m = self.measured;
        match self.expect {
            Expect::Rel { value, .. } | Expect::Abs { value, .. } => {
                write!(f, "{}={m} expected {value} {verdict}", self.label)
            }
            Expect::Within { value, tol } => {
                write!(f, "{}={m} expected {value} ± {tol} {verdict}", self.label)
            }
            Expect::AtMost(b) => write!(f, "{}={m} expected <= {b} {verdict}", self.label),
            Expect::AtLeast(b) => write!(f, "{}={m} expected >= {b} {verdict}", self.label),
        }
    }
}

/// Runs one suite (or all of them in order).
pub fn run_suite(suite: Suite, seed: u64, opts: &McOptions) -> Vec<Check> {
    match suite {
        Suite::Lattice => lattice_suite(),
        Suite::Saddle => saddle_suite(),
        Suite::Unitary => unitary_suite(seed),
        Suite::Oracle => oracle_suite(seed, opts),
        Suite::Dual => dual_suite(seed),
        Suite::All => Suite::EACH
            .iter()
            .flat_map(|&s| run_suite(s, seed, opts))
            .collect(),
    }
}

fn max_rel(pairs: impl Iterator<Item = (Complex<f64>, Complex<f64>)>) -> f64 {
    pairs
        .map(|(a, b)| (a - b).norm() / b.norm())
        .fold(0.0, f64::max)
}

/// Column `i` of `(-Δ + x)^{-1}` by complex Gaussian elimination.
fn neumann_inverse_column(m: usize, x: Complex<f64>, i: usize) -> Vec<Complex<f64>> {
    let one = Complex::new(1.0, 0.0);
    let diag: Vec<Complex<f64>> = (0..m)
        .map(|k| {
            let d = if m == 1 { 0.0 } else if k == 0 || k == m - 1 { 1.0 } else { 2.0 };
            x + d
        })
        .collect();
    let mut rhs = vec![Complex::new(0.0, 0.0); m];
    rhs[i] = one;
    let mut c = vec![Complex::new(0.0, 0.0); m];
    let mut d = vec![Complex::new(0.0, 0.0); m];
    c[0] = -one / diag[0];
    d[0] = rhs[0] / diag[0];
    for k in 1..m {
        let denom = diag[k] + c[k - 1];
        c[k] = -one / denom;
        d[k] = (rhs[k] + d[k - 1]) / denom;
    }
    let mut sol = d.clone();
    for k in (0..m - 1).rev() {
        sol[k] = d[k] - c[k] * sol[k + 1];
    }
    sol
}

fn lattice_suite() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::new("T_2(0.5)", char_poly_t(2, 0.5), Expect::Rel { value: 2.75, tol: 1e-15 }));
    out.push(Check::new("T_3(0.5)", char_poly_t(3, 0.5), Expect::Rel { value: 5.375, tol: 1e-15 }));
    out.push(Check::new("S_1(0.5)", char_poly_s(1, 0.5), Expect::Rel { value: 0.5, tol: 0.0 }));
    out.push(Check::new("S_2(0.5)", char_poly_s(2, 0.5), Expect::Rel { value: 1.25, tol: 1e-15 }));

    let l3 = neumann_laplacian::<f64>(Lattice1D::with_sites(3).unwrap());
    let dev3 = l3
        .diag()
        .iter()
        .zip([1.0, 2.0, 1.0])
        .map(|(a, b)| (a - b).abs())
        .chain(l3.off().iter().map(|e| (e + 1.0).abs()))
        .fold(0.0, f64::max);
    out.push(Check::new("laplacian(N=3) deviation from d=[1,2,1] e=[-1,-1]", dev3, Expect::Abs { value: 0.0, tol: 0.0 }));
    let l1 = neumann_laplacian::<f64>(Lattice1D::with_sites(1).unwrap());
    out.push(Check::new("laplacian(N=1) d_0", l1.diag()[0], Expect::Abs { value: 0.0, tol: 0.0 }));

    match covariance_profile::<f64>(Lattice1D::with_sites(1).unwrap(), 7.0) {
        Ok(j) => out.push(Check::new("J(N=1,W=7)_00", j.get(0, 0), Expect::Abs { value: 1.0, tol: 1e-15 })),
        Err(e) => out.push(Check::failed("J(N=1)", e)),
    }
    for &(n, w) in &[(3usize, 1.0), (201, 10.0)] {
        let lat = Lattice1D::with_sites(n).unwrap();
        let j = covariance_profile::<f64>(lat, w).unwrap();
        let worst = (0..n)
            .map(|i| (j.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max);
        out.push(Check::new(format!("max |J·1 - 1| (N={n},W={w})"), worst, Expect::AtMost(1e-12)));
        let precision = neumann_laplacian::<f64>(lat).scaled_shifted(w * w, 1.0);
        out.push(Check::new(
            format!("eigenvalues of W²(-Δ)+I below 0 (N={n},W={w})"),
            count_below(&precision, 0.0) as f64,
            Expect::Abs { value: 0.0, tol: 0.0 },
        ));
    }

    // Exponential decay of J away from the diagonal: least-squares slope of
    // log J_{c,c+k} against the infinite-chain rate acosh(1 + 1/(2W²)).
    let (n, w) = (201, 10.0);
    let j = covariance_profile::<f64>(Lattice1D::with_sites(n).unwrap(), w).unwrap();
    let c = n / 2;
    let ks: Vec<f64> = (20..=60).map(|k| k as f64).collect();
    let ys: Vec<f64> = (20..=60).map(|k| j.get(c, c + k).ln()).collect();
    let kbar = ks.iter().sum::<f64>() / ks.len() as f64;
    let ybar = ys.iter().sum::<f64>() / ys.len() as f64;
    let slope = ks.iter().zip(&ys).map(|(k, y)| (k - kbar) * (y - ybar)).sum::<f64>()
        / ks.iter().map(|k| (k - kbar).powi(2)).sum::<f64>();
    let rate = (1.0 + 0.5 / (w * w)).acosh();
    out.push(Check::new("decay rate of J (N=201,W=10)", -slope, Expect::Rel { value: rate, tol: 1e-3 }));

    let xs = [
        Complex::new(0.3, 0.0),
        Complex::new(2.5, 0.0),
        Complex::new(-1.5, 0.7),
        Complex::new(0.1, -1.9),
        Complex::new(3.7, 0.2),
    ];
    let closed = max_rel((1..=12).flat_map(|m| {
        xs.iter().flat_map(move |&x| {
            [
                (char_poly_t_closed(m, x), char_poly_t(m, x)),
                (char_poly_s_closed(m, x), char_poly_s(m, x)),
            ]
        })
    }));
    out.push(Check::new("closed form vs recurrence, max rel err (m<=12)", closed, Expect::AtMost(1e-10)));

    match green_entry(2, Complex::new(0.5, 0.0), 1.0, 1) {
        Ok(g) => out.push(Check::new("G_11(m=2,x=1)", g.re, Expect::Rel { value: 2.0 / 3.0, tol: 1e-15 })),
        Err(e) => out.push(Check::failed("G_11(m=2,x=1)", e)),
    }
    let (m, gamma, w) = (10, Complex::new(1.0, 0.5), 3.0);
    let x = gamma * 2.0 / (w * w);
    let green = max_rel((1..=m).map(|i| {
        let g = green_entry(m, gamma, w, i).unwrap();
        (g, neumann_inverse_column(m, x, i - 1)[i - 1])
    }));
    out.push(Check::new("green_entry vs direct solve, max rel err (m=10,γ=1+0.5i,W=3)", green, Expect::AtMost(1e-8)));

    let (gamma, w) = (1.7f64, 2.5);
    match gaussian_partition(1, Complex::<f64>::new(gamma, 0.0), w) {
        Ok(z) => out.push(Check::new(
            "Z(m=1,γ=1.7,W=2.5)",
            z.re.exp(),
            Expect::Rel { value: w * (PI / gamma).sqrt(), tol: 1e-13 },
        )),
        Err(e) => out.push(Check::failed("Z(m=1)", e)),
    }
    let (w, m) = (30.0f64, 300);
    let z = gaussian_partition(m, Complex::<f64>::new(1.0, 0.0), w).unwrap();
    let asym = gaussian_partition_sinh_asymptotic(m, Complex::<f64>::new(1.0, 0.0), w);
    out.push(Check::new(
        "|Z| / sinh form (m=10W,W=30,γ=1)",
        (z.re - asym.re).exp(),
        Expect::Abs { value: 1.0, tol: 0.02 },
    ));
    out
}

fn saddle_suite() -> Vec<Check> {
    let mut out = Vec::new();
    out.push(Check::new("rho(0)", semicircle_density(0.0), Expect::Rel { value: 1.0 / PI, tol: 1e-15 }));
    out.push(Check::new("rho(2)", semicircle_density(2.0), Expect::Abs { value: 0.0, tol: 0.0 }));
    out.push(Check::new("rho(-2)", semicircle_density(-2.0), Expect::Abs { value: 0.0, tol: 0.0 }));
    let n = 2000;
    let h = PI / n as f64;
    let g = |th: f64| semicircle_density(2.0 * th.sin()) * 2.0 * th.cos();
    let mut acc = 0.0;
    for k in 0..=n {
        let th = -PI / 2.0 + k as f64 * h;
        let wgt = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += wgt * g(th);
    }
    out.push(Check::new("integral of rho", acc * h / 3.0, Expect::Abs { value: 1.0, tol: 1e-10 }));

    let s0 = saddle_data(0.0).unwrap();
    out.push(Check::new("a_+(0)", s0.a_plus, Expect::Abs { value: 1.0, tol: 1e-15 }));
    out.push(Check::new("a_-(0)", s0.a_minus, Expect::Abs { value: -1.0, tol: 1e-15 }));
    out.push(Check::new("|c_+(0) - 1|", (s0.c_plus - 1.0).norm(), Expect::AtMost(1e-15)));
    out.push(Check::new("c_0(0)", s0.c0, Expect::Abs { value: 0.5, tol: 1e-15 }));
    let s1 = saddle_data(1.0).unwrap();
    out.push(Check::new("a_+(1)", s1.a_plus, Expect::Abs { value: 3f64.sqrt() / 2.0, tol: 1e-15 }));
    out.push(Check::new("Re c_+(1)", s1.c_plus.re, Expect::Abs { value: 0.75, tol: 1e-15 }));
    let conj = (0..20)
        .map(|k| {
            let s = saddle_data(-1.9 + 0.19 * k as f64).unwrap();
            (s.c_minus - s.c_plus.conj()).norm()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("max |c_- - conj c_+|", conj, Expect::AtMost(0.0)));
    out.push(Check::new(
        "saddle_data(2) rejected",
        saddle_data(2.0).is_err() as u8 as f64,
        Expect::Abs { value: 1.0, tol: 0.0 },
    ));

    for &l0 in &[0.0, 0.5, 1.0, 1.5] {
        let s = saddle_data(l0).unwrap();
        for (name, a, c) in [("+", s.a_plus, s.c_plus), ("-", s.a_minus, s.c_minus)] {
            out.push(Check::new(format!("f_*(a_{name}) at λ0={l0}"), f_star(a, l0), Expect::Abs { value: 0.0, tol: 1e-12 }));
            let h = 1e-5;
            let d1 = (f_star(a + h, l0) - f_star(a - h, l0)) / (2.0 * h);
            out.push(Check::new(format!("|f_*'(a_{name})| at λ0={l0}"), d1.abs(), Expect::AtMost(1e-7)));
            let h = 1e-3;
            let at = |x: f64| f(Complex::new(x, 0.0), l0).unwrap();
            let coef = (at(a + h) + at(a - h) - at(a) * 2.0) / (2.0 * h * h);
            out.push(Check::new(
                format!("|quadratic coefficient - c_{name}| at λ0={l0}, h=1e-3"),
                (coef - c).norm(),
                Expect::AtMost(1e-4),
            ));
        }
    }

    for &l0 in &[0.0, 1.0] {
        let s = saddle_data(l0).unwrap();
        let alpha = 0.5 * (1.0 - l0 * l0 / 4.0);
        let delta = 0.01;
        let margin = (0..10_000)
            .map(|k| -10.0 + (10.0 + delta) * k as f64 / 10_000.0)
            .map(|x| {
                (f_star(x, l0) - alpha * (x - s.a_minus).powi(2))
                    .min(f_star(-x, l0) - alpha * (-x - s.a_plus).powi(2))
            })
            .fold(f64::INFINITY, f64::min);
        out.push(Check::new(
            format!("min of f_* - α(x-a_∓)² on 10^4-point grid (δ=0.01), λ0={l0}"),
            margin,
            Expect::AtLeast(0.0),
        ));
        let delta = 0.1;
        let gap = (0..=10_000)
            .map(|k| -10.0 + 20.0 * k as f64 / 10_000.0)
            .filter(|x| (x - s.a_plus).abs() >= delta && (x - s.a_minus).abs() >= delta)
            .map(|x| f_star(x, l0) - alpha * delta * delta)
            .fold(f64::INFINITY, f64::min);
        out.push(Check::new(
            format!("min of f_* - αδ² outside U_δ(a_±) (δ=0.1), λ0={l0}"),
            gap,
            Expect::AtLeast(0.0),
        ));
    }

    out.push(Check::new("sinc(0)", sine_kernel(0.0), Expect::Abs { value: 1.0, tol: 0.0 }));
    out.push(Check::new("sinc(1)", sine_kernel(1.0), Expect::Abs { value: 0.0, tol: 1e-15 }));
    out.push(Check::new("sinc(0.5)", sine_kernel(0.5), Expect::Rel { value: 2.0 / PI, tol: 1e-15 }));
    let p = scaled_lambdas(0.0, 1.0, 0.0, 100).unwrap();
    out.push(Check::new("lambda_1(λ0=0,ξ1=1,N=100)", p.lambda1, Expect::Rel { value: PI / 100.0, tol: 1e-15 }));
    out
}

fn mean_se(vals: impl Iterator<Item = f64>) -> (f64, f64) {
    let (mut n, mut s, mut s2) = (0.0, 0.0, 0.0);
    for v in vals {
        n += 1.0;
        s += v;
        s2 += v * v;
    }
    let mean = s / n;
    (mean, ((s2 / n - mean * mean).max(0.0) / n).sqrt())
}

/// Haar samples per Monte Carlo comparison.
pub const HAAR_SAMPLES: u64 = 1_000_000;

fn unitary_suite(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    for s in 0..=6u32 {
        out.push(Check::new(
            format!("h_{s}(0)"),
            v12_moment(s, 0.0),
            Expect::Abs { value: 1.0 / (s as f64 + 1.0), tol: 1e-12 },
        ));
    }
    let cross = (0..=25u32)
        .flat_map(|s| [8.0, -8.0].map(|x| (s, x)))
        .map(|(s, x): (u32, f64)| {
            let a: f64 = v12_moment_series(s, x);
            let b = v12_moment_closed(s, x);
            ((a - b) / b).abs()
        })
        .fold(0.0, f64::max);
    out.push(Check::new("series vs closed form at |x|=8, max rel diff (s<=25)", cross, Expect::AtMost(1e-9)));
    out.push(Check::new("hciz(t=0)", hciz_2x2(0.4, -1.0, 2.0, 0.5, 0.0), Expect::Abs { value: 1.0, tol: 1e-15 }));
    out.push(Check::new(
        "hciz(c1=c2=0.7,d=(1.3,-0.4),t=0.9)",
        hciz_2x2(0.7, 0.7, 1.3, -0.4, 0.9),
        Expect::Rel { value: (0.9f64 * 0.7 * 0.9).exp(), tol: 1e-14 },
    ));

    let haar = |k: u64| -> Unitary2<f64> { haar_u2(RngStream::new(seed, k)) };
    let defect = (0..10_000).map(|k| haar(k).unitarity_defect()).fold(0.0, f64::max);
    out.push(Check::new("max ||U*U - I|| over 10^4 Haar samples", defect, Expect::AtMost(1e-12)));
    let (m, se) = mean_se((0..100_000).map(|k| haar(k).m[0][1].norm_sqr()));
    out.push(Check::new("E|U_12|^2 (10^5 samples)", m, Expect::Within { value: 0.5, tol: 4.0 * se }));

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for p in 0..10u64 {
        let c = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
        let d = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
        let t: f64 = rng.random_range(-1.0..1.0);
        let base = (p + 1) * HAAR_SAMPLES;
        let (m, se) = mean_se((0..HAAR_SAMPLES).map(|k| (t * haar(base + k).trace_form(c, d)).exp()));
        out.push(Check::new(
            format!("Haar MC / hciz point {p} (c={c:.3?},d={d:.3?},t={t:.3})"),
            m,
            Expect::Within { value: hciz_2x2(c[0], c[1], d[0], d[1], t), tol: 4.0 * se },
        ));
    }
    for p in 0..10u64 {
        let c = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let d = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
        let t: f64 = rng.random_range(-2.0..2.0);
        let tr_cd = c[0] * d[0] + c[1] * d[1];
        let x = t * (c[0] - c[1]) * (d[0] - d[1]);
        let base = (p + 11) * HAAR_SAMPLES;
        let (m, se) = mean_se((0..HAAR_SAMPLES).map(|k| {
            let v = haar(base + k);
            v.m[0][1].norm_sqr() * (t * (v.trace_form(c, d) - tr_cd)).exp()
        }));
        out.push(Check::new(
            format!("Haar MC / h_1(x={x:.4}) point {p}"),
            m,
            Expect::Within { value: v12_moment(1, x), tol: 4.0 * se },
        ));
    }
    out
}

/// Monte Carlo samples per oracle comparison.
pub const ORACLE_SAMPLES: u64 = 1_000_000;

/// `(N, W, λ₁, λ₂)` for the Wick-oracle comparison.
pub const ORACLE_CASES: [(usize, f64, f64, f64); 3] = [(1, 1.0, 0.3, -0.2), (2, 1.0, 0.5, -0.4), (3, 2.0, 0.45, 1.1)];

fn oracle_case(n: usize, w: f64, l1: f64, l2: f64, seed: u64, opts: &McOptions) -> Result<Vec<Check>> {
    let ens = Ensemble::band(n, w)?;
    let Ensemble::Band(profile) = &ens else { unreachable!() };
    let est = mc_f2(&ens, l1, l2, ORACLE_SAMPLES, seed, opts)?;
    let mut out = Vec::new();
    for (a, b, la, lb) in [(0, 1, l1, l2), (0, 0, l1, l1), (1, 1, l2, l2)] {
        let e = est.estimate(a, b)?;
        let exact = wick_exact_f2(la, lb, profile)?;
        out.push(Check::new(
            format!("F2_mc(N={n},W={w},{la},{lb})"),
            e.mean(),
            Expect::Within { value: exact, tol: 4.0 * e.stderr_abs() },
        ));
        out.push(Check::new(
            format!("stderr/|F2| (N={n},W={w},{la},{lb})"),
            e.relative_stderr(),
            Expect::AtMost(0.02),
        ));
    }
    out.push(Check::new(
        format!("rejected samples (N={n})"),
        est.rejected() as f64,
        Expect::Abs { value: 0.0, tol: 0.0 },
    ));
    if n == 1 {
        let d = est.d2(0, 1)?;
        out.push(Check::new(
            format!("D2_mc(N=1,{l1},{l2})"),
            d.value,
            Expect::Within {
                value: ((1.0 + l1 * l1) * (1.0 + l2 * l2)).sqrt(),
                tol: 4.0 * d.stderr,
            },
        ));
    }
    Ok(out)
}

fn oracle_suite(seed: u64, opts: &McOptions) -> Vec<Check> {
    let mut out = Vec::new();
    let p1 = covariance_profile::<f64>(Lattice1D::with_sites(1).unwrap(), 1.0).unwrap();
    match wick_exact_f2(0.3, -0.2, &p1) {
        Ok(v) => out.push(Check::new("wick F2(N=1,0.3,-0.2)", v, Expect::Rel { value: 0.94, tol: 1e-15 })),
        Err(e) => out.push(Check::failed("wick F2(N=1)", e)),
    }
    for &(n, w, l1, l2) in &ORACLE_CASES {
        match oracle_case(n, w, l1, l2, seed, opts) {
            Ok(c) => out.extend(c),
            Err(e) => out.push(Check::failed(format!("oracle N={n}"), e)),
        }
    }
    let ens = Ensemble::band(9, 3.0).unwrap();
    let coincident = scaled_lambdas(0.4, 0.0, 0.0, 9)
        .and_then(|p| bandmoment_core::moments::ratio_vs_sine(&p, &ens, 5_000, seed, opts));
    match coincident {
        Ok(r) => out.push(Check::new("ratio at ξ1=ξ2=0 (N=9)", r.ratio, Expect::Abs { value: 1.0, tol: 0.0 })),
        Err(e) => out.push(Check::failed("ratio at ξ1=ξ2", e)),
    }
    let exchange = scaled_lambdas(0.4, 0.7, -0.3, 9).and_then(|p| {
        let a = bandmoment_core::moments::ratio_vs_sine(&p, &ens, 5_000, seed, opts)?;
        let b = bandmoment_core::moments::ratio_vs_sine(&p.swapped(), &ens, 5_000, seed, opts)?;
        Ok((a.ratio - b.ratio).abs())
    });
    match exchange {
        Ok(d) => out.push(Check::new("|ratio(ξ1,ξ2) - ratio(ξ2,ξ1)| (N=9)", d, Expect::Abs { value: 0.0, tol: 0.0 })),
        Err(e) => out.push(Check::failed("exchange symmetry", e)),
    }
    out
}

/// `(λ₀, ξ₁, ξ₂)` combinations for the single-site dual-representation check.
pub fn dual_parameter_grid() -> Vec<(f64, f64, f64)> {
    let xis = [(0.0, 0.0), (0.5, -0.5), (0.3, -0.2), (1.0, 0.25)];
    [0.0, 0.5, 1.0]
        .iter()
        .flat_map(|&l0| xis.iter().map(move |&(a, b)| (l0, a, b)))
        .collect()
}

fn wick_at(n: usize, w: f64, l0: f64, xi1: f64, xi2: f64) -> Result<f64> {
    let p = scaled_lambdas(l0, xi1, xi2, n)?;
    let prof = covariance_profile(Lattice1D::with_sites(n)?, w)?;
    wick_exact_f2(p.lambda1, p.lambda2, &prof)
}

fn dual_suite(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let grids: Vec<QuadratureGrid<f64>> = [32, 40, 48]
        .iter()
        .map(|&n| QuadratureGrid::gauss_hermite(n).unwrap())
        .collect();
    for (l0, x1, x2) in dual_parameter_grid() {
        let tag = format!("(λ0={l0},ξ=({x1},{x2}))");
        let vals: Result<Vec<Complex<f64>>> = grids.iter().map(|g| dual_f2_n1(l0, x1, x2, g)).collect();
        let exact = wick_at(1, 1.0, l0, x1, x2);
        match (vals, exact) {
            (Ok(v), Ok(exact)) => {
                out.push(Check::new(format!("dual F2 N=1 {tag}, 40 nodes"), v[1].re, Expect::Rel { value: exact, tol: 1e-6 }));
                out.push(Check::new(format!("|Im| / |Re| {tag}"), v[1].im.abs() / v[1].re.abs(), Expect::AtMost(1e-8)));
                let spread = (v[0] - v[1]).norm().max((v[1] - v[2]).norm());
                out.push(Check::new(format!("32/40/48-node spread {tag}"), spread, Expect::AtMost(1e-8)));
            }
            (Err(e), _) | (_, Err(e)) => out.push(Check::failed(format!("dual F2 N=1 {tag}"), e)),
        }
    }

    let (l0, x1, x2, w) = (0.0, 0.2, -0.1, 1.0);
    match (dual_f2_n2_mc(l0, x1, x2, w, 200_000, seed), wick_at(2, w, l0, x1, x2)) {
        (Ok(est), Ok(exact)) => {
            out.push(Check::new(
                "dual F2 N=2 MC (λ0=0,ξ=(0.2,-0.1),W=1)",
                est.value.re,
                Expect::Within { value: exact, tol: 4.0 * est.stderr_re },
            ));
            out.push(Check::new("Im dual F2 N=2 MC", est.value.im, Expect::Within { value: 0.0, tol: 4.0 * est.stderr_im }));
            // The formula's leading "-" is (-1)^N; taken literally at even N it
            // returns -F2.
            out.push(Check::new(
                "literal leading minus at N=2: |(-F2_mc) - F2| / stderr",
                (-est.value.re - exact).abs() / est.stderr_re,
                Expect::AtLeast(10.0),
            ));
        }
        (Err(e), _) | (_, Err(e)) => out.push(Check::failed("dual F2 N=2 MC", e)),
    }
    out
}
