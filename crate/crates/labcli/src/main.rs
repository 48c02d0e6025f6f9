//! `labcli`: runs lab experiments from flags or a TOML config and writes
//! a JSON report (plus a CSV table where the experiment has one).
//!
//! Exit codes: 0 all assertions pass, 1 an assertion failed, 2 the config or
//! command line did not parse, 3 the config did not validate.

mod config;
mod report;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use bilab_lab::theorem::Target;
use config::{Experiment, ExperimentConfig, ExponentConfig};
use suites::SuiteError;

#[derive(Parser)]
#[command(name = "labcli", version, about = "Experiments on bilinear pseudo-differential operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition-of-unity sums and supports.
    PartitionsCheck(Flags),
    /// Decay of the frequency-localised symbol pieces in j and k.
    DecayFit(Flags),
    /// Sizes of the index sets against their predicted bounds.
    LambdaCount(Flags),
    /// Grouped L² × L^∞ → L² ratios against j.
    GroupedScan(Flags),
    /// Lower bound for an operator norm.
    Opnorm(Flags),
    /// Critical order over a grid of (1/p, 1/q).
    CriticalTable(Flags),
    /// Weak-type decomposition of |x|^(-n/p).
    WeakDemo(Flags),
    /// Frequency rescaling of a dyadic piece.
    RescaleCheck(Flags),
    /// Sup ratio for the full operator.
    TheoremSuite(Flags),
    /// Fast against direct evaluation of an x-independent symbol.
    BenchFastPath(Flags),
    /// Runs the experiment described by a TOML file.
    Run { config: PathBuf },
}

/// Flags shared by every experiment. Unset values keep the defaults.
#[derive(Args, Clone, Default)]
struct Flags {
    #[arg(long)]
    seed: Option<u64>,
    /// Spatial dimension.
    #[arg(long)]
    n: Option<usize>,
    /// Points per axis.
    #[arg(long = "N")]
    points: Option<usize>,
    /// Period of the torus.
    #[arg(long = "L")]
    period: Option<f64>,
    #[arg(long)]
    rho: Option<f64>,
    /// Symbol order (default: the critical order).
    #[arg(long, allow_hyphen_values = true)]
    m: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Symbol id: exotic or exotic-multiplier.
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    j_range: Option<Vec<usize>>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    k_range: Option<Vec<usize>>,
    #[arg(long)]
    jmax: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    /// l2-linf or linf-bmo.
    #[arg(long)]
    target: Option<Target>,
    /// Exponent p (opnorm, rescale-check, weak-demo).
    #[arg(long)]
    p: Option<f64>,
    /// Exponent q (opnorm, rescale-check).
    #[arg(long)]
    q: Option<f64>,
    /// Exponent r (weak-demo).
    #[arg(long)]
    r: Option<f64>,
    /// Band ratio α (weak-demo).
    #[arg(long)]
    alpha: Option<f64>,
    /// Slope tolerance of the fits.
    #[arg(long)]
    slope_tolerance: Option<f64>,
    /// Required speedup (bench-fast-path).
    #[arg(long)]
    min_speedup: Option<f64>,
}

impl Flags {
    fn apply(self, experiment: Experiment) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(experiment);
        macro_rules! set {
            ($($field:ident => $target:expr),*) => { $( if let Some(v) = self.$field { $target = v; } )* };
        }
        set!(seed => c.seed, n => c.n, points => c.points, period => c.period, rho => c.rho, out => c.out);
        c.m = self.m;
        if let Some(s) = self.symbol {
            c.symbol.id = s;
        }
        c.j_range = self.j_range.map(|v| [v[0], v[1]]);
        c.k_range = self.k_range.map(|v| [v[0], v[1]]);
        c.jmax = self.jmax;
        c.trials = self.trials;
        c.target = self.target;
        if experiment == Experiment::WeakDemo {
            set!(p => c.weak.p, r => c.weak.r, alpha => c.weak.alpha);
        } else if self.p.is_some() || self.q.is_some() {
            c.exponents = Some(ExponentConfig { p: self.p.unwrap_or(2.0), q: self.q.unwrap_or(f64::INFINITY) });
        }
        c.tolerance.slope = self.slope_tolerance;
        c.tolerance.speedup = self.min_speedup;
        c
    }
}

const PASS: u8 = 0;
const FAILED: u8 = 1;
const PARSE: u8 = 2;
const INVALID: u8 = 3;

fn load(path: &PathBuf) -> Result<ExperimentConfig, (u8, String)> {
    let text = std::fs::read_to_string(path).map_err(|e| (PARSE, format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| (PARSE, format!("{}: {e}", path.display())))
}

fn threads() -> Result<(), (u8, String)> {
    let Ok(v) = std::env::var("LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().ok().filter(|n| *n > 0).ok_or((INVALID, format!("LAB_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| (FAILED, e.to_string()))
}

fn execute(command: Command) -> Result<bool, (u8, String)> {
    let config = match command {
        Command::Run { config } => load(&config)?,
        Command::PartitionsCheck(f) => f.apply(Experiment::PartitionsCheck),
        Command::DecayFit(f) => f.apply(Experiment::DecayFit),
        Command::LambdaCount(f) => f.apply(Experiment::LambdaCount),
        Command::GroupedScan(f) => f.apply(Experiment::GroupedScan),
        Command::Opnorm(f) => f.apply(Experiment::Opnorm),
        Command::CriticalTable(f) => f.apply(Experiment::CriticalTable),
        Command::WeakDemo(f) => f.apply(Experiment::WeakDemo),
        Command::RescaleCheck(f) => f.apply(Experiment::RescaleCheck),
        Command::TheoremSuite(f) => f.apply(Experiment::TheoremSuite),
        Command::BenchFastPath(f) => f.apply(Experiment::BenchFastPath),
    };
    config.validate().map_err(|e| (INVALID, e))?;
    threads()?;
    let start = Instant::now();
    let outcome = suites::run(&config).map_err(|e| match e {
        SuiteError::Invalid(m) => (INVALID, m),
        SuiteError::Failed(m) => (FAILED, m),
    })?;
    let seconds = start.elapsed().as_secs_f64();
    // a closed stdout (e.g. piped into `head`) must not abort the run
    let mut stdout = std::io::stdout().lock();
    for a in &outcome.assertions {
        let _ = writeln!(stdout, "{} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    let (json, csv) = report::write(&config, &outcome, seconds).map_err(|e| (FAILED, format!("writing reports: {e}")))?;
    let _ = writeln!(stdout, "report: {}", json.display());
    if let Some(p) = csv {
        let _ = writeln!(stdout, "table: {}", p.display());
    }
    Ok(outcome.pass())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { PARSE } else { PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.command) {
        Ok(true) => ExitCode::from(PASS),
        Ok(false) => ExitCode::from(FAILED),
        Err((code, msg)) => {
            eprintln!("labcli: {msg}");
            ExitCode::from(code)
        }
    }
}
