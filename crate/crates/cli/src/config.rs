//! Flat `key = value` experiment files.
//!
//! ```text
//! # comment
//! ensemble = band        # band | gue
//! n = 64
//! theta = 1              # or: w = 64
//! lambda0 = 0
//! xi_grid = 0.125,-0.125; 0.25,-0.25
//! samples = 20000
//! seed = 7
//! threads = 4
//! out = scan.csv
//! bins = 80
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use bandmoment_core::moments::EnsembleKind;

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    Explicit(f64),
    /// `W = round(N^{(1+θ)/2})`.
    Theta(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub ensemble: EnsembleKind,
    pub n: usize,
    pub bandwidth: Option<Bandwidth>,
    pub lambda0: f64,
    pub xi_grid: Vec<(f64, f64)>,
    pub samples: u64,
    pub seed: u64,
    pub threads: Option<usize>,
    pub output_path: Option<PathBuf>,
    /// Histogram bins for `spectrum`.
    pub bins: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            ensemble: EnsembleKind::Band,
            n: 0,
            bandwidth: None,
            lambda0: 0.0,
            xi_grid: vec![(0.0, 0.0)],
            samples: 10_000,
            seed: 0,
            threads: None,
            output_path: None,
            bins: 80,
        }
    }
}

/// Rounded `N^{(1+θ)/2}`, never below 1.
pub fn bandwidth_from_theta(n: usize, theta: f64) -> f64 {
    (n as f64).powf(0.5 * (1.0 + theta)).round().max(1.0)
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
    value
        .parse()
        .or_else(|_| invalid(format!("{key}: cannot parse '{value}'")))
}

fn parse_xi_grid(value: &str) -> Result<Vec<(f64, f64)>, ConfigError> {
    let mut grid = Vec::new();
    for pair in value.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let parts: Vec<&str> = pair.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return invalid(format!("xi_grid: expected 'xi1,xi2', got '{pair}'"));
        }
        grid.push((parse_num("xi_grid", parts[0])?, parse_num("xi_grid", parts[1])?));
    }
    if grid.is_empty() {
        return invalid("xi_grid is empty");
    }
    Ok(grid)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut w = None;
        let mut theta = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return invalid(format!("line {}: expected key = value", lineno + 1));
            };
            let (key, value) = (key.trim().to_ascii_lowercase(), value.trim());
            match key.as_str() {
                "ensemble" => {
                    cfg.ensemble = value
                        .parse()
                        .or_else(|_| invalid(format!("ensemble: unknown '{value}'")))?
                }
                "n" => cfg.n = parse_num(&key, value)?,
                "w" | "bandwidth" => w = Some(parse_num::<f64>(&key, value)?),
                "theta" => theta = Some(parse_num::<f64>(&key, value)?),
                "lambda0" => cfg.lambda0 = parse_num(&key, value)?,
                "xi_grid" => cfg.xi_grid = parse_xi_grid(value)?,
                "samples" => cfg.samples = parse_num(&key, value)?,
                "seed" => cfg.seed = parse_num(&key, value)?,
                "threads" => cfg.threads = Some(parse_num(&key, value)?),
                "out" | "output" | "output_path" => cfg.output_path = Some(PathBuf::from(value)),
                "bins" => cfg.bins = parse_num(&key, value)?,
                other => return invalid(format!("line {}: unknown key '{other}'", lineno + 1)),
            }
        }
        cfg.bandwidth = match (w, theta) {
            (Some(_), Some(_)) => return invalid("give either w or theta, not both"),
            (Some(w), None) => Some(Bandwidth::Explicit(w)),
            (None, Some(t)) => Some(Bandwidth::Theta(t)),
            (None, None) => None,
        };
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .or_else(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n == 0 {
            return invalid("n must be a positive integer");
        }
        if !(self.lambda0.abs() < 2.0) {
            return invalid(format!("lambda0 = {} is outside the bulk (-2, 2)", self.lambda0));
        }
        if self.samples == 0 {
            return invalid("samples must be positive");
        }
        if self.threads == Some(0) {
            return invalid("threads must be positive");
        }
        if self.bins == 0 {
            return invalid("bins must be positive");
        }
        if self.xi_grid.iter().any(|&(a, b)| !a.is_finite() || !b.is_finite()) {
            return invalid("xi_grid entries must be finite");
        }
        match (self.ensemble, self.bandwidth) {
            (EnsembleKind::Band, None) => return invalid("band ensemble needs w or theta"),
            (_, Some(Bandwidth::Theta(t))) if !(t > 0.0 && t <= 1.0) => {
                return invalid(format!("theta = {t} must satisfy 0 < theta <= 1"))
            }
            (_, Some(Bandwidth::Explicit(w))) if !(w > 0.0 && w.is_finite()) => {
                return invalid(format!("w = {w} must be positive"))
            }
            _ => {}
        }
        Ok(())
    }

    /// Bandwidth actually used (infinite for GUE).
    pub fn resolved_bandwidth(&self) -> f64 {
        match (self.ensemble, self.bandwidth) {
            (EnsembleKind::Gue, _) => f64::INFINITY,
            (_, Some(Bandwidth::Explicit(w))) => w,
            (_, Some(Bandwidth::Theta(t))) => bandwidth_from_theta(self.n, t),
            (_, None) => f64::NAN,
        }
    }

    /// Provenance comment describing how `W` was obtained.
    pub fn bandwidth_rule(&self) -> String {
        match (self.ensemble, self.bandwidth) {
            (EnsembleKind::Gue, _) => "none (GUE, J_ij = 1/N)".to_string(),
            (_, Some(Bandwidth::Explicit(w))) => format!("explicit W = {w}"),
            (_, Some(Bandwidth::Theta(t))) => {
                let w = bandwidth_from_theta(self.n, t);
                let target = (self.n as f64).powf(1.0 + t);
                format!(
                    "W = round(N^((1+theta)/2)) = {w} with theta = {t}; W^2 / N^(1+theta) = {}",
                    w * w / target
                )
            }
            (_, None) => "unset".to_string(),
        }
    }
}
