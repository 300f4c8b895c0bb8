//! Second mixed moment `F₂(λ₁, λ₂) = E[det(λ₁ - H) det(λ₂ - H)]`: an exact
//! Wick expansion for tiny matrices and a log-domain Monte Carlo estimator
//! with jackknife errors for the normalised ratio `F₂ / D₂`.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::charpoly::{char_det, tridiagonalize};
use crate::error::{Error, Result};
use crate::hermitian::HermitianMatrix;
use crate::lattice::{covariance_profile, CovarianceProfile, Lattice1D};
use crate::saddle::{sine_kernel, SpectralParams};
use crate::sampler::{sample_gue, sample_rbm, RngStream};
use crate::scalar::Real;
use crate::signed_log::SignedLog;

/// Largest size accepted by [`wick_exact_f2`].
pub const WICK_MAX_DIM: usize = 3;

/// Samples per parallel work unit; also the granularity of the max-shift.
pub const BATCH_SIZE: u64 = 4096;

/// Jackknife blocks.
pub const JACKKNIFE_BLOCKS: u64 = 50;

fn permutations(n: usize) -> Vec<(Vec<usize>, i8)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for k in 0..used.len() {
            if !used[k] {
                used[k] = true;
                prefix.push(k);
                rec(prefix, used, out);
                prefix.pop();
                used[k] = false;
            }
        }
    }
    let mut perms = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut perms);
    perms
        .into_iter()
        .map(|p| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

/// `E[Π H_{a_k b_k}]` by Isserlis pairing with
/// `E[H_ab H_cd] = J_ab [c = b][d = a]`.
fn gaussian_moment<T: Real>(factors: &[(usize, usize)], profile: &CovarianceProfile<T>) -> T {
    if factors.is_empty() {
        return T::one();
    }
    if factors.len() % 2 == 1 {
        return T::zero();
    }
    let (a, b) = factors[0];
    let mut total = T::zero();
    for k in 1..factors.len() {
        let (c, d) = factors[k];
        if c == b && d == a {
            let rest: Vec<(usize, usize)> = factors[1..]
                .iter()
                .enumerate()
                .filter(|&(idx, _)| idx + 1 != k)
                .map(|(_, &f)| f)
                .collect();
            total = total + profile.get(a, b) * gaussian_moment(&rest, profile);
        }
    }
    total
}

/// Expands `Π_i (λ δ_{i,σ(i)} - H_{i,σ(i)})` into `(coefficient, H-factors)`.
fn expand_product<T: Real>(perm: &[usize], lambda: T) -> Vec<(T, Vec<(usize, usize)>)> {
    let mut terms = vec![(T::one(), Vec::new())];
    for (i, &j) in perm.iter().enumerate() {
        let mut next = Vec::with_capacity(terms.len() * 2);
        for (coef, factors) in &terms {
            if i == j {
                next.push((*coef * lambda, factors.clone()));
            }
            let mut f = factors.clone();
            f.push((i, j));
            next.push((-*coef, f));
        }
        terms = next;
    }
    terms
}

/// Exact `E[det(λ₁ - H) det(λ₂ - H)]` for `N <= 3`, expanding both
/// determinants over permutations and pairing the Gaussian entries.
pub fn wick_exact_f2<T: Real>(lambda1: T, lambda2: T, profile: &CovarianceProfile<T>) -> Result<T> {
    let n = profile.sites();
    if n > WICK_MAX_DIM {
        return Err(Error::Unsupported {
            n,
            max: WICK_MAX_DIM,
        });
    }
    let perms = permutations(n);
    let mut total = T::zero();
    for (sigma, s_sign) in &perms {
        let left = expand_product(sigma, lambda1);
        for (tau, t_sign) in &perms {
            let right = expand_product(tau, lambda2);
            let sign = T::from_i8(s_sign * t_sign).unwrap();
            for (cl, fl) in &left {
                for (cr, fr) in &right {
                    let mut factors = fl.clone();
                    factors.extend_from_slice(fr);
                    total = total + sign * *cl * *cr * gaussian_moment(&factors, profile);
                }
            }
        }
    }
    Ok(total)
}

/// Which random-matrix ensemble to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnsembleKind {
    Band,
    Gue,
}

impl std::str::FromStr for EnsembleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "band" | "rbm" => Ok(Self::Band),
            "gue" => Ok(Self::Gue),
            other => Err(Error::InvalidArgument(format!("unknown ensemble '{other}'"))),
        }
    }
}

impl std::fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Band => "band",
            Self::Gue => "gue",
        })
    }
}

/// A ready-to-sample ensemble.
#[derive(Debug, Clone)]
pub enum Ensemble {
    Band(CovarianceProfile<f64>),
    Gue(usize),
}

impl Ensemble {
    pub fn band(n: usize, bandwidth: f64) -> Result<Self> {
        let lat = Lattice1D::with_sites(n)?;
        Ok(Self::Band(covariance_profile(lat, bandwidth)?))
    }

    pub fn gue(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("matrix size must be positive".into()));
        }
        Ok(Self::Gue(n))
    }

    pub fn new(kind: EnsembleKind, n: usize, bandwidth: f64) -> Result<Self> {
        match kind {
            EnsembleKind::Band => Self::band(n, bandwidth),
            EnsembleKind::Gue => Self::gue(n),
        }
    }

    pub fn kind(&self) -> EnsembleKind {
        match self {
            Self::Band(_) => EnsembleKind::Band,
            Self::Gue(_) => EnsembleKind::Gue,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Band(p) => p.sites(),
            Self::Gue(n) => *n,
        }
    }

    pub fn sample(&self, stream: RngStream) -> HermitianMatrix<f64> {
        match self {
            Self::Band(p) => sample_rbm(p, stream),
            Self::Gue(n) => sample_gue(*n, stream),
        }
    }
}

/// Runtime knobs for the Monte Carlo drivers.
#[derive(Clone, Default)]
pub struct McOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Checked before every batch; set it to abandon the run.
    pub cancel: Option<Arc<AtomicBool>>,
    /// Incremented by the number of finished samples after every batch.
    pub progress: Option<Arc<AtomicU64>>,
}

impl McOptions {
    pub fn with_threads(threads: usize) -> Self {
        Self {
            threads: Some(threads),
            ..Self::default()
        }
    }

    fn cancelled(&self) -> bool {
        self.cancel
            .as_ref()
            .is_some_and(|c| c.load(Ordering::Relaxed))
    }

    /// Runs `f` inside a pool of the requested size.
    pub fn install<R: Send>(&self, f: impl FnOnce() -> R + Send) -> Result<R> {
        match self.threads {
            None => Ok(f()),
            Some(t) => {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(t.max(1))
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
                Ok(pool.install(f))
            }
        }
    }
}

/// Running `Σ v`, `Σ v²` of real values `v = s·e^ℓ`, stored relative to a
/// common shift `e^{shift}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogMoments {
    pub shift: f64,
    pub sum: f64,
    pub sum_sq: f64,
    pub count: u64,
}

impl Default for LogMoments {
    fn default() -> Self {
        Self {
            shift: f64::NEG_INFINITY,
            sum: 0.0,
            sum_sq: 0.0,
            count: 0,
        }
    }
}

impl LogMoments {
    /// Accumulates a batch with a single max-shift.
    pub fn from_batch(values: &[SignedLog<f64>]) -> Self {
        let shift = values
            .iter()
            .filter(|v| !v.is_zero())
            .map(|v| v.log_mag)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut acc = Self {
            shift,
            count: values.len() as u64,
            ..Self::default()
        };
        if shift == f64::NEG_INFINITY {
            return acc;
        }
        for v in values {
            let x = v.value_shifted(shift);
            acc.sum += x;
            acc.sum_sq += x * x;
        }
        acc
    }

    /// Re-expresses the sums relative to `shift >= self.shift`.
    pub fn rescaled(&self, shift: f64) -> Self {
        if self.shift == f64::NEG_INFINITY || shift == self.shift {
            return Self { shift, ..*self };
        }
        let f = (self.shift - shift).exp();
        Self {
            shift,
            sum: self.sum * f,
            sum_sq: self.sum_sq * f * f,
            count: self.count,
        }
    }

    pub fn merge(&self, other: &Self) -> Self {
        let shift = self.shift.max(other.shift);
        let a = self.rescaled(shift);
        let b = other.rescaled(shift);
        Self {
            shift,
            sum: a.sum + b.sum,
            sum_sq: a.sum_sq + b.sum_sq,
            count: a.count + b.count,
        }
    }
}

/// Mean of a Monte Carlo quantity. The true mean is
/// `value · exp(log_scale)`; `log_scale` is zero unless the mean would
/// overflow or underflow a double.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub log_scale: f64,
    pub samples: u64,
    pub rejected: u64,
    pub in_log_domain: bool,
}

impl MomentEstimate {
    fn from_moments(m: &LogMoments, rejected: u64) -> Self {
        let n = m.count as f64;
        let mean = m.sum / n;
        let var = ((m.sum_sq / n - mean * mean) * n / (n - 1.0)).max(0.0);
        let err = (var / n).sqrt();
        let log_mean = m.shift + mean.abs().ln();
        let (value, stderr, log_scale) = if mean == 0.0 {
            (0.0, err * m.shift.exp(), 0.0)
        } else if log_mean.abs() < 600.0 {
            let s = m.shift.exp();
            (mean * s, err * s, 0.0)
        } else {
            (mean.signum(), err / mean.abs(), log_mean)
        };
        Self {
            value,
            stderr,
            log_scale,
            samples: m.count,
            rejected,
            in_log_domain: true,
        }
    }

    /// `value · exp(log_scale)` (may over/underflow).
    pub fn mean(&self) -> f64 {
        self.value * self.log_scale.exp()
    }

    pub fn stderr_abs(&self) -> f64 {
        self.stderr * self.log_scale.exp()
    }

    pub fn relative_stderr(&self) -> f64 {
        (self.stderr / self.value).abs()
    }
}

/// Per-block accumulators for every requested `(a, b)` product of
/// `det(λ_a - H) det(λ_b - H)`.
#[derive(Debug, Clone)]
pub struct F2Estimates {
    lambdas: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    /// `blocks[pair][block]`
    blocks: Vec<Vec<LogMoments>>,
    rejected: u64,
}

fn pair_key(a: usize, b: usize) -> (usize, usize) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl F2Estimates {
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn rejected(&self) -> u64 {
        self.rejected
    }

    fn pair_index(&self, a: usize, b: usize) -> Result<usize> {
        let key = pair_key(a, b);
        self.pairs
            .iter()
            .position(|&p| p == key)
            .ok_or_else(|| Error::InvalidArgument(format!("pair {key:?} was not accumulated")))
    }

    fn total(&self, pair: usize) -> LogMoments {
        self.blocks[pair]
            .iter()
            .fold(LogMoments::default(), |acc, b| acc.merge(b))
    }

    /// `E[det(λ_a - H) det(λ_b - H)]`.
    pub fn estimate(&self, a: usize, b: usize) -> Result<MomentEstimate> {
        let p = self.pair_index(a, b)?;
        Ok(MomentEstimate::from_moments(&self.total(p), self.rejected))
    }

    /// Block sums of one pair relative to the pair's global shift.
    fn aligned_blocks(&self, pair: usize) -> (f64, Vec<LogMoments>) {
        let shift = self.blocks[pair]
            .iter()
            .map(|b| b.shift)
            .fold(f64::NEG_INFINITY, f64::max);
        (
            shift,
            self.blocks[pair].iter().map(|b| b.rescaled(shift)).collect(),
        )
    }

    /// Applies `stat(S_ab, S_aa, S_bb, n)` to the full sample and to every
    /// leave-one-block-out sample. Returns `(full, jackknife stderr)`.
    fn jackknife(
        &self,
        pairs: &[usize],
        stat: impl Fn(&[f64], &[f64], f64) -> f64,
    ) -> (f64, f64) {
        let aligned: Vec<(f64, Vec<LogMoments>)> =
            pairs.iter().map(|&p| self.aligned_blocks(p)).collect();
        let shifts: Vec<f64> = aligned.iter().map(|a| a.0).collect();
        let nblocks = aligned[0].1.len();
        let totals: Vec<f64> = aligned.iter().map(|a| a.1.iter().map(|b| b.sum).sum()).collect();
        let count: u64 = aligned[0].1.iter().map(|b| b.count).sum();
        let full = stat(&totals, &shifts, count as f64);
        if nblocks < 2 {
            return (full, f64::NAN);
        }
        let loo: Vec<f64> = (0..nblocks)
            .map(|k| {
                let sums: Vec<f64> = aligned
                    .iter()
                    .zip(&totals)
                    .map(|(a, t)| t - a.1[k].sum)
                    .collect();
                stat(&sums, &shifts, (count - aligned[0].1[k].count) as f64)
            })
            .collect();
        let g = nblocks as f64;
        let mean = loo.iter().sum::<f64>() / g;
        let var = loo.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() * (g - 1.0) / g;
        (full, var.sqrt())
    }

    /// `F₂(λ_a, λ_b) / sqrt(F₂(λ_a, λ_a) F₂(λ_b, λ_b))` with jackknife error.
    pub fn ratio(&self, a: usize, b: usize) -> Result<(f64, f64)> {
        let (a, b) = pair_key(a, b);
        let idx = [
            self.pair_index(a, b)?,
            self.pair_index(a, a)?,
            self.pair_index(b, b)?,
        ];
        for &p in &idx[1..] {
            if !(self.total(p).sum > 0.0) {
                return Err(Error::InsufficientSampling(
                    "nonpositive diagonal moment estimate".into(),
                ));
            }
        }
        Ok(self.jackknife(&idx, |s, m, _| {
            s[0] / (s[1] * s[2]).sqrt() * (m[0] - 0.5 * (m[1] + m[2])).exp()
        }))
    }

    /// `D₂ = F₂(λ_a, λ_a)^{1/2} F₂(λ_b, λ_b)^{1/2}` with jackknife error.
    pub fn d2(&self, a: usize, b: usize) -> Result<MomentEstimate> {
        let (a, b) = pair_key(a, b);
        let idx = [self.pair_index(a, a)?, self.pair_index(b, b)?];
        let tot = [self.total(idx[0]), self.total(idx[1])];
        if !(tot[0].sum > 0.0 && tot[1].sum > 0.0) {
            return Err(Error::InsufficientSampling(
                "nonpositive diagonal moment estimate".into(),
            ));
        }
        // Work relative to the full-sample value so the jackknife stays in range.
        let log_full = |s: &[f64], m: &[f64], n: f64| {
            0.5 * ((s[0] * s[1]).ln() + m[0] + m[1]) - n.ln()
        };
        let (aligned_a, aligned_b) = (self.aligned_blocks(idx[0]), self.aligned_blocks(idx[1]));
        let count: u64 = aligned_a.1.iter().map(|b| b.count).sum();
        let sums = [
            aligned_a.1.iter().map(|b| b.sum).sum::<f64>(),
            aligned_b.1.iter().map(|b| b.sum).sum::<f64>(),
        ];
        let log_d2 = log_full(&sums, &[aligned_a.0, aligned_b.0], count as f64);
        let (rel, rel_err) = self.jackknife(&idx, |s, m, n| {
            if s[0] > 0.0 && s[1] > 0.0 {
                (log_full(s, m, n) - log_d2).exp()
            } else {
                f64::NAN
            }
        });
        debug_assert!((rel - 1.0).abs() < 1e-9);
        let (value, stderr, log_scale) = if log_d2.abs() < 600.0 {
            let v = log_d2.exp();
            (v, rel_err * v, 0.0)
        } else {
            (1.0, rel_err, log_d2)
        };
        Ok(MomentEstimate {
            value,
            stderr,
            log_scale,
            samples: count,
            rejected: self.rejected,
            in_log_domain: true,
        })
    }
}

/// Monte Carlo accumulation of `det(λ_a - H) det(λ_b - H)` for all
/// requested pairs. Each sample is tridiagonalised once and its determinant
/// evaluated at every `λ`; samples with a non-finite determinant are
/// rejected and counted.
///
/// The result depends only on `(ensemble, lambdas, pairs, samples, seed)`:
/// batches have fixed boundaries and are reduced in index order.
pub fn mc_f2_pairs(
    ensemble: &Ensemble,
    lambdas: &[f64],
    pairs: &[(usize, usize)],
    samples: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<F2Estimates> {
    if samples < 2 {
        return Err(Error::InsufficientSampling(format!(
            "need at least 2 samples, got {samples}"
        )));
    }
    if lambdas.iter().any(|l| !l.is_finite()) {
        return Err(Error::InvalidArgument("spectral parameters must be finite".into()));
    }
    let mut keys: Vec<(usize, usize)> = Vec::new();
    for &(a, b) in pairs {
        if a >= lambdas.len() || b >= lambdas.len() {
            return Err(Error::InvalidArgument(format!("pair ({a}, {b}) out of range")));
        }
        let k = pair_key(a, b);
        if !keys.contains(&k) {
            keys.push(k);
        }
    }

    let nblocks = JACKKNIFE_BLOCKS.min(samples);
    let mut jobs: Vec<(usize, u64, u64)> = Vec::new();
    for blk in 0..nblocks {
        let start = blk * samples / nblocks;
        let end = (blk + 1) * samples / nblocks;
        let mut s = start;
        while s < end {
            let e = (s + BATCH_SIZE).min(end);
            jobs.push((blk as usize, s, e));
            s = e;
        }
    }

    let run_job = |&(blk, start, end): &(usize, u64, u64)| -> Option<(usize, Vec<LogMoments>, u64)> {
        if opts.cancelled() {
            return None;
        }
        let mut products: Vec<Vec<SignedLog<f64>>> =
            vec![Vec::with_capacity((end - start) as usize); keys.len()];
        let mut rejected = 0;
        for idx in start..end {
            let h = ensemble.sample(RngStream::new(seed, idx));
            let t = tridiagonalize(&h);
            let dets: Vec<SignedLog<f64>> = lambdas.iter().map(|&l| char_det(&t, l)).collect();
            if dets.iter().any(|d| !d.is_finite()) {
                rejected += 1;
                continue;
            }
            for (k, &(a, b)) in keys.iter().enumerate() {
                products[k].push(dets[a] * dets[b]);
            }
        }
        if let Some(p) = &opts.progress {
            p.fetch_add(end - start, Ordering::Relaxed);
        }
        let acc = products.iter().map(|v| LogMoments::from_batch(v)).collect();
        Some((blk, acc, rejected))
    };

    let results: Vec<Option<(usize, Vec<LogMoments>, u64)>> =
        opts.install(|| jobs.par_iter().map(run_job).collect())?;

    let mut blocks = vec![vec![LogMoments::default(); nblocks as usize]; keys.len()];
    let mut rejected = 0;
    for r in results {
        let (blk, acc, rej) = r.ok_or(Error::Cancelled)?;
        rejected += rej;
        for (k, m) in acc.into_iter().enumerate() {
            blocks[k][blk] = blocks[k][blk].merge(&m);
        }
    }
    if blocks.iter().flatten().any(|b| b.count == 0) {
        return Err(Error::InsufficientSampling(
            "a jackknife block has no accepted samples".into(),
        ));
    }
    Ok(F2Estimates {
        lambdas: lambdas.to_vec(),
        pairs: keys,
        blocks,
        rejected,
    })
}

/// `F₂` estimates for `λ = [λ₁, λ₂]` at the pairs `(1,2)`, `(1,1)`, `(2,2)`
/// (indices `0` and `1`).
pub fn mc_f2(
    ensemble: &Ensemble,
    lambda1: f64,
    lambda2: f64,
    samples: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<F2Estimates> {
    mc_f2_pairs(
        ensemble,
        &[lambda1, lambda2],
        &[(0, 1), (0, 0), (1, 1)],
        samples,
        seed,
        opts,
    )
}

/// `D₂` from the diagonal estimates at indices `a` and `b`.
pub fn d2(estimates: &F2Estimates, a: usize, b: usize) -> Result<MomentEstimate> {
    estimates.d2(a, b)
}

/// `D₂⁻¹ F₂` at one unfolded point together with the sine-kernel reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioResult {
    pub params: SpectralParams<f64>,
    pub ratio: f64,
    pub stderr: f64,
    pub sine_ref: f64,
    pub deviation: f64,
}

impl RatioResult {
    pub fn new(params: SpectralParams<f64>, ratio: f64, stderr: f64) -> Self {
        let sine_ref = sine_kernel(params.xi1 - params.xi2);
        Self {
            params,
            ratio,
            stderr,
            sine_ref,
            deviation: ratio - sine_ref,
        }
    }
}

/// Estimates `F₂(λ₁, λ₂) / D₂` at the unfolded point `params` with the
/// numerator and both normalisation factors taken from the same samples.
pub fn ratio_vs_sine(
    params: &SpectralParams<f64>,
    ensemble: &Ensemble,
    samples: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<RatioResult> {
    if params.n != ensemble.dim() {
        return Err(Error::InvalidArgument(format!(
            "unfolding uses N = {} but the ensemble has N = {}",
            params.n,
            ensemble.dim()
        )));
    }
    let est = mc_f2(ensemble, params.lambda1, params.lambda2, samples, seed, opts)?;
    let (ratio, stderr) = est.ratio(0, 1)?;
    Ok(RatioResult::new(*params, ratio, stderr))
}
