//! The `moment-scan` and `spectrum` experiments. Both return the complete
//! CSV text; nothing here touches the filesystem or the terminal.

use std::fmt::Write as _;

use bandmoment_core::charpoly::{count_below, eigenvalues_bisection, tridiagonalize};
use bandmoment_core::moments::{mc_f2_pairs, Ensemble, McOptions, RatioResult};
use bandmoment_core::saddle::{scaled_lambdas, semicircle_cdf};
use bandmoment_core::sampler::RngStream;
use bandmoment_core::Error;
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig};

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    Estimator(Error),
    Cancelled,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => e.fmt(f),
            Self::Estimator(e) => write!(f, "estimator failed: {e}"),
            Self::Cancelled => f.write_str("interrupted"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Cancelled => Self::Cancelled,
            other => Self::Estimator(other),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

/// Float format for CSV cells: 17 significant digits, round-trip exact.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const SCAN_HEADER: &str = "xi1,xi2,ratio,stderr,sine_ref,deviation,n_dim,bandwidth,samples,seed";

pub const SPECTRUM_HEADER: &str = "bin,lambda_lo,lambda_hi,count,mass,semicircle_mass";

/// Marker appended to a CSV whose run was interrupted.
pub const INCOMPLETE_TRAILER: &str = "# INCOMPLETE";

fn build_ensemble(cfg: &ExperimentConfig) -> Result<Ensemble, RunError> {
    cfg.validate()?;
    Ensemble::new(cfg.ensemble, cfg.n, cfg.resolved_bandwidth())
        .map_err(|e| RunError::Config(ConfigError(e.to_string())))
}

fn provenance(cfg: &ExperimentConfig, out: &mut String) {
    let _ = writeln!(out, "# ensemble={} lambda0={}", cfg.ensemble, fmt_f64(cfg.lambda0));
    let _ = writeln!(out, "# bandwidth_rule: {}", cfg.bandwidth_rule());
}

#[derive(Debug, Clone)]
pub struct ScanOutput {
    pub rows: Vec<RatioResult>,
    pub rejected: u64,
    pub csv: String,
}

/// Ratio `F₂/D₂` at every ξ-pair of the grid. All pairs share one set of
/// samples; each sample is tridiagonalised once and its determinant
/// evaluated at every distinct `λ`.
pub fn moment_scan(cfg: &ExperimentConfig, opts: &McOptions) -> Result<ScanOutput, RunError> {
    let ensemble = build_ensemble(cfg)?;
    let mut lambdas: Vec<f64> = Vec::new();
    let mut index_of = |l: f64| -> usize {
        match lambdas.iter().position(|x| x.to_bits() == l.to_bits()) {
            Some(i) => i,
            None => {
                lambdas.push(l);
                lambdas.len() - 1
            }
        }
    };
    let mut points = Vec::with_capacity(cfg.xi_grid.len());
    let mut pairs = Vec::new();
    for &(xi1, xi2) in &cfg.xi_grid {
        let p = scaled_lambdas(cfg.lambda0, xi1, xi2, cfg.n)?;
        let (a, b) = (index_of(p.lambda1), index_of(p.lambda2));
        pairs.extend([(a, b), (a, a), (b, b)]);
        points.push((p, a, b));
    }
    let est = mc_f2_pairs(&ensemble, &lambdas, &pairs, cfg.samples, cfg.seed, opts)?;

    let mut rows = Vec::with_capacity(points.len());
    for (p, a, b) in points {
        let (ratio, stderr) = est.ratio(a, b)?;
        rows.push(RatioResult::new(p, ratio, stderr));
    }

    let bandwidth = cfg.resolved_bandwidth();
    let mut csv = String::new();
    csv.push_str(SCAN_HEADER);
    csv.push('\n');
    for r in &rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_f64(r.params.xi1),
            fmt_f64(r.params.xi2),
            fmt_f64(r.ratio),
            fmt_f64(r.stderr),
            fmt_f64(r.sine_ref),
            fmt_f64(r.deviation),
            cfg.n,
            fmt_f64(bandwidth),
            cfg.samples,
            cfg.seed
        );
    }
    provenance(cfg, &mut csv);
    let _ = writeln!(csv, "# rejected_samples={}", est.rejected());
    Ok(ScanOutput {
        rows,
        rejected: est.rejected(),
        csv,
    })
}

/// Half-width of the histogram window; the outermost bins are open-ended.
pub const SPECTRUM_RANGE: f64 = 2.5;

#[derive(Debug, Clone)]
pub struct SpectrumOutput {
    /// Interior bin edges; bin 0 is `(-inf, edges[0])`, the last bin
    /// `[edges[last], inf)`.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub masses: Vec<f64>,
    pub semicircle_masses: Vec<f64>,
    /// Kolmogorov distance between the pooled eigenvalue distribution and the
    /// semicircle law.
    pub ks_distance: f64,
    /// Pooled fraction of eigenvalues below `λ₀`.
    pub ncm_at_lambda0: f64,
    pub csv: String,
}

/// Pooled normalised counting measure of `cfg.samples` matrices.
pub fn spectrum(cfg: &ExperimentConfig, opts: &McOptions) -> Result<SpectrumOutput, RunError> {
    let ensemble = build_ensemble(cfg)?;
    let bins = cfg.bins.max(2);
    let edges: Vec<f64> = (1..bins)
        .map(|k| -SPECTRUM_RANGE + 2.0 * SPECTRUM_RANGE * k as f64 / bins as f64)
        .collect();
    let n = cfg.n;
    let lambda0 = cfg.lambda0;

    let per_sample = |idx: u64| -> Option<(Vec<usize>, usize, Vec<f64>)> {
        if opts.cancel.as_ref().is_some_and(|c| c.load(std::sync::atomic::Ordering::Relaxed)) {
            return None;
        }
        let t = tridiagonalize(&ensemble.sample(RngStream::new(cfg.seed, idx)));
        let below: Vec<usize> = edges.iter().map(|&e| count_below(&t, e)).collect();
        let at0 = count_below(&t, lambda0);
        let eig = eigenvalues_bisection(&t);
        if let Some(p) = &opts.progress {
            p.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
        }
        Some((below, at0, eig))
    };
    let results: Vec<Option<(Vec<usize>, usize, Vec<f64>)>> = opts
        .install(|| (0..cfg.samples).into_par_iter().map(per_sample).collect())
        .map_err(RunError::from)?;

    let mut cumulative = vec![0u64; edges.len()];
    let mut below0 = 0u64;
    let mut pooled = Vec::with_capacity(n * cfg.samples as usize);
    for r in results {
        let (below, at0, eig) = r.ok_or(RunError::Cancelled)?;
        for (c, b) in cumulative.iter_mut().zip(below) {
            *c += b as u64;
        }
        below0 += at0 as u64;
        pooled.extend(eig);
    }
    let total = n as u64 * cfg.samples;
    let mut counts = Vec::with_capacity(bins);
    let mut prev = 0u64;
    for &c in &cumulative {
        counts.push(c - prev);
        prev = c;
    }
    counts.push(total - prev);
    let masses: Vec<f64> = counts.iter().map(|&c| c as f64 / total as f64).collect();
    let cdf_at = |k: usize| -> f64 {
        if k == 0 {
            0.0
        } else if k > edges.len() {
            1.0
        } else {
            semicircle_cdf(edges[k - 1])
        }
    };
    let semicircle_masses: Vec<f64> = (0..bins).map(|k| cdf_at(k + 1) - cdf_at(k)).collect();

    pooled.sort_by(f64::total_cmp);
    let m = pooled.len() as f64;
    let ks_distance = pooled
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = semicircle_cdf(x);
            ((i + 1) as f64 / m - f).max(f - i as f64 / m)
        })
        .fold(0.0, f64::max);
    let ncm_at_lambda0 = below0 as f64 / total as f64;

    let mut csv = String::new();
    csv.push_str(SPECTRUM_HEADER);
    csv.push('\n');
    for k in 0..bins {
        let lo = if k == 0 { f64::NEG_INFINITY } else { edges[k - 1] };
        let hi = if k == bins - 1 { f64::INFINITY } else { edges[k] };
        let _ = writeln!(
            csv,
            "{k},{},{},{},{},{}",
            fmt_f64(lo),
            fmt_f64(hi),
            counts[k],
            fmt_f64(masses[k]),
            fmt_f64(semicircle_masses[k])
        );
    }
    provenance(cfg, &mut csv);
    let _ = writeln!(
        csv,
        "# n_dim={} bandwidth={} samples={} seed={}",
        n,
        fmt_f64(cfg.resolved_bandwidth()),
        cfg.samples,
        cfg.seed
    );
    let _ = writeln!(csv, "# ncm_below_lambda0={}", fmt_f64(ncm_at_lambda0));
    let _ = writeln!(csv, "# ks_distance={}", fmt_f64(ks_distance));
    Ok(SpectrumOutput {
        edges,
        counts,
        masses,
        semicircle_masses,
        ks_distance,
        ncm_at_lambda0,
        csv,
    })
}

/// The CSV written when a run is interrupted: header, whatever rows were
/// complete, and the trailer.
pub fn incomplete_csv(header: &str) -> String {
    format!("{header}\n{INCOMPLETE_TRAILER}\n")
}
