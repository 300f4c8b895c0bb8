use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use bandmoment::config::{ConfigError, ExperimentConfig};
use bandmoment::run::{self, RunError};
use bandmoment::verify::{self, Suite};
use bandmoment_core::moments::McOptions;
use clap::{Parser, Subcommand};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_ESTIMATOR: u8 = 3;
const EXIT_INTERRUPTED: u8 = 130;

const PROGRESS_INTERVAL: Duration = Duration::from_secs(5);

/// Characteristic-polynomial moments of Gaussian band matrices.
#[derive(Parser, Debug)]
#[command(name = "bandmoment", version)]
struct Cli {
    /// Experiment file (flat key = value).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed; overrides the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads. Precedence: this flag, the config file,
    /// BANDMOMENT_THREADS, then all cores.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Monte Carlo samples; overrides the config file.
    #[arg(long, global = true)]
    samples: Option<u64>,
    /// Output CSV; defaults to the config's `out`, else stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Suppress progress reports on stderr.
    #[arg(long, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Ratio F2/D2 against the sine kernel over the configured ξ grid.
    MomentScan,
    /// Built-in consistency checks.
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Histogram of the pooled eigenvalue counting measure.
    Spectrum,
}

fn env_threads() -> Result<Option<usize>, ConfigError> {
    match std::env::var("BANDMOMENT_THREADS") {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(ConfigError(format!("BANDMOMENT_THREADS: expected a positive integer, got '{v}'"))),
        },
        _ => Ok(None),
    }
}

struct Progress {
    done: Arc<AtomicBool>,
    handle: Option<std::thread::JoinHandle<()>>,
}

impl Progress {
    fn start(counter: Arc<AtomicU64>, total: u64, what: &'static str) -> Self {
        let done = Arc::new(AtomicBool::new(false));
        let flag = done.clone();
        let handle = std::thread::spawn(move || {
            let start = Instant::now();
            let mut next = PROGRESS_INTERVAL;
            while !flag.load(Ordering::Relaxed) {
                std::thread::sleep(Duration::from_millis(100));
                let elapsed = start.elapsed();
                if elapsed >= next {
                    next += PROGRESS_INTERVAL;
                    let k = counter.load(Ordering::Relaxed);
                    eprintln!("{what}: {k}/{total} samples after {:.0} s", elapsed.as_secs_f64());
                }
            }
        });
        Self {
            done,
            handle: Some(handle),
        }
    }
}

impl Drop for Progress {
    fn drop(&mut self) {
        self.done.store(true, Ordering::Relaxed);
        if let Some(h) = self.handle.take() {
            let _ = h.join();
        }
    }
}

fn write_output(path: Option<&PathBuf>, text: &str) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()
        }
    }
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("bandmoment: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let env = match env_threads() {
        Ok(t) => t,
        Err(e) => return fail(EXIT_CONFIG, e),
    };

    let cancel = Arc::new(AtomicBool::new(false));
    {
        let cancel = cancel.clone();
        let _ = ctrlc::set_handler(move || cancel.store(true, Ordering::Relaxed));
    }
    let counter = Arc::new(AtomicU64::new(0));

    if let Command::Verify { suite } = cli.command {
        let threads = cli.threads.or(env);
        if threads == Some(0) {
            return fail(EXIT_CONFIG, "--threads must be positive");
        }
        let opts = McOptions {
            threads,
            cancel: Some(cancel),
            progress: None,
        };
        let checks = verify::run_suite(suite, cli.seed.unwrap_or(0), &opts);
        let failed = checks.iter().filter(|c| !c.passed()).count();
        let mut report: String = checks.iter().map(|c| format!("{c}\n")).collect();
        report.push_str(&format!(
            "verify {}: {}/{} checks passed\n",
            suite.name(),
            checks.len() - failed,
            checks.len()
        ));
        if let Err(e) = write_output(cli.out.as_ref(), &report) {
            return fail(EXIT_CONFIG, format!("cannot write output: {e}"));
        }
        return if failed == 0 {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_VERIFY_FAILED)
        };
    }

    let Some(path) = cli.config.as_ref() else {
        return fail(EXIT_CONFIG, "invalid configuration: --config is required");
    };
    let mut cfg = match ExperimentConfig::load(path) {
        Ok(c) => c,
        Err(e) => return fail(EXIT_CONFIG, e),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(s) = cli.samples {
        cfg.samples = s;
    }
    cfg.threads = cli.threads.or(cfg.threads).or(env);
    if let Err(e) = cfg.validate() {
        return fail(EXIT_CONFIG, e);
    }
    let out_path = cli.out.clone().or_else(|| cfg.output_path.clone());
    let opts = McOptions {
        threads: cfg.threads,
        cancel: Some(cancel),
        progress: Some(counter.clone()),
    };

    let (header, result) = {
        let _progress = (!cli.quiet).then(|| {
            let what = match cli.command {
                Command::MomentScan => "moment-scan",
                _ => "spectrum",
            };
            Progress::start(counter, cfg.samples, what)
        });
        match cli.command {
            Command::MomentScan => (run::SCAN_HEADER, run::moment_scan(&cfg, &opts).map(|o| o.csv)),
            _ => (run::SPECTRUM_HEADER, run::spectrum(&cfg, &opts).map(|o| o.csv)),
        }
    };

    match result {
        Ok(csv) => match write_output(out_path.as_ref(), &csv) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(EXIT_CONFIG, format!("cannot write output: {e}")),
        },
        Err(RunError::Cancelled) => {
            let _ = write_output(out_path.as_ref(), &run::incomplete_csv(header));
            fail(EXIT_INTERRUPTED, "interrupted; partial output marked incomplete")
        }
        Err(RunError::Config(e)) => fail(EXIT_CONFIG, e),
        Err(e @ RunError::Estimator(_)) => fail(EXIT_ESTIMATOR, e),
    }
}
