//! Experiment configuration: TOML files for `run`, flags for the subcommands.

use std::path::PathBuf;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use bilab_core::symbols::Exotic;
use bilab_lab::theorem::Target;

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DIM: usize = 1;
pub const DEFAULT_POINTS: usize = 256;
pub const DEFAULT_PERIOD: f64 = 40.0;
pub const DEFAULT_RHO: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PartitionsCheck,
    DecayFit,
    LambdaCount,
    GroupedScan,
    Opnorm,
    CriticalTable,
    WeakDemo,
    RescaleCheck,
    TheoremSuite,
    BenchFastPath,
}

impl Experiment {
    pub fn id(self) -> &'static str {
        match self {
            Experiment::PartitionsCheck => "partitions-check",
            Experiment::DecayFit => "decay-fit",
            Experiment::LambdaCount => "lambda-count",
            Experiment::GroupedScan => "grouped-scan",
            Experiment::Opnorm => "opnorm",
            Experiment::CriticalTable => "critical-table",
            Experiment::WeakDemo => "weak-demo",
            Experiment::RescaleCheck => "rescale-check",
            Experiment::TheoremSuite => "theorem-suite",
            Experiment::BenchFastPath => "bench-fast-path",
        }
    }
}

/// Symbol selection. `id` is checked against [`SYMBOL_IDS`] during validation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolConfig {
    pub id: String,
    /// Phase amplitude `c` of the built-in symbol.
    pub phase: Option<f64>,
    /// Log-periodic wobble `a` of the phase.
    pub wobble: Option<f64>,
    /// Amplitude `κ` of the x-modulation.
    pub kappa: Option<f64>,
}

pub const SYMBOL_IDS: [&str; 2] = ["exotic", "exotic-multiplier"];

impl Default for SymbolConfig {
    fn default() -> Self {
        Self { id: "exotic".into(), phase: None, wobble: None, kappa: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentConfig {
    pub p: f64,
    pub q: f64,
}

/// Thresholds of the hard assertions. Unset fields keep the built-in values.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Allowed deviation of fitted slopes.
    pub slope: Option<f64>,
    /// Bound on `|Λ|` over its predicted size.
    pub count_ratio: Option<f64>,
    /// Bound on the recombined weak-type constant.
    pub weak_constant: Option<f64>,
    /// Pointwise error of the rescaling identity.
    pub pointwise: Option<f64>,
    /// Relative disagreement of the rescaled operator norms.
    pub ratio: Option<f64>,
    /// Required fast-path speedup.
    pub speedup: Option<f64>,
    /// Partition-of-unity error.
    pub partition: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeakConfig {
    pub p: f64,
    pub r: f64,
    pub alpha: f64,
}

impl Default for WeakConfig {
    fn default() -> Self {
        Self { p: 2.0, r: 1.0, alpha: 1.0 }
    }
}

fn seed() -> u64 {
    DEFAULT_SEED
}
fn dim() -> usize {
    DEFAULT_DIM
}
fn points() -> usize {
    DEFAULT_POINTS
}
fn period() -> f64 {
    DEFAULT_PERIOD
}
fn rho() -> f64 {
    DEFAULT_RHO
}
fn out() -> PathBuf {
    PathBuf::from("reports")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "seed")]
    pub seed: u64,
    #[serde(default = "dim")]
    pub n: usize,
    #[serde(rename = "N", default = "points")]
    pub points: usize,
    #[serde(rename = "L", default = "period")]
    pub period: f64,
    #[serde(default = "rho")]
    pub rho: f64,
    /// Symbol order; the critical order of the target when unset.
    pub m: Option<f64>,
    #[serde(default)]
    pub symbol: SymbolConfig,
    /// Inclusive `[lo, hi]`.
    pub j_range: Option<[usize; 2]>,
    pub k_range: Option<[usize; 2]>,
    pub exponents: Option<ExponentConfig>,
    pub trials: Option<usize>,
    #[serde(default = "out")]
    pub out: PathBuf,
    #[serde(default)]
    pub tolerance: Tolerances,
    pub target: Option<Target>,
    /// Largest shell for the set counts.
    pub jmax: Option<usize>,
    #[serde(default)]
    pub weak: WeakConfig,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            seed: DEFAULT_SEED,
            n: DEFAULT_DIM,
            points: DEFAULT_POINTS,
            period: DEFAULT_PERIOD,
            rho: DEFAULT_RHO,
            m: None,
            symbol: SymbolConfig::default(),
            j_range: None,
            k_range: None,
            exponents: None,
            trials: None,
            out: out(),
            tolerance: Tolerances::default(),
            target: None,
            jmax: None,
            weak: WeakConfig::default(),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(1..=2).contains(&self.n) {
            return Err(format!("n must be 1 or 2, got {}", self.n));
        }
        // set counts and the critical table never build a grid
        let gridless = matches!(self.experiment, Experiment::LambdaCount | Experiment::CriticalTable);
        let cap = if self.n == 1 || gridless { 512 } else { 64 };
        if self.points < 4 || !self.points.is_multiple_of(2) || self.points > cap {
            return Err(format!("N must be even, at least 4 and at most {cap} for n = {}, got {}", self.n, self.points));
        }
        if !(self.period.is_finite() && self.period > 0.0) {
            return Err(format!("L must be positive, got {}", self.period));
        }
        if !(0.0..1.0).contains(&self.rho) {
            return Err(format!("rho must lie in [0, 1), got {}", self.rho));
        }
        if let Some(m) = self.m {
            if !m.is_finite() {
                return Err("m must be finite".into());
            }
        }
        if !SYMBOL_IDS.contains(&self.symbol.id.as_str()) {
            return Err(format!("unknown symbol id {:?}; known ids: {}", self.symbol.id, SYMBOL_IDS.join(", ")));
        }
        for (name, r) in [("j_range", self.j_range), ("k_range", self.k_range)] {
            if let Some([lo, hi]) = r {
                if lo > hi {
                    return Err(format!("{name} must satisfy lo <= hi"));
                }
            }
        }
        if let Some([lo, _]) = self.j_range {
            if lo == 0 {
                return Err("j_range must start at 1 or above".into());
            }
        }
        if let Some(e) = self.exponents {
            if !(e.p >= 1.0 && e.q >= 1.0) {
                return Err("exponents need p, q >= 1".into());
            }
        }
        if self.trials == Some(0) {
            return Err("trials must be positive".into());
        }
        if self.weak.p <= 0.0 || self.weak.r <= 0.0 || self.weak.alpha <= 0.0 {
            return Err("weak p, r and alpha must be positive".into());
        }
        Ok(())
    }

    /// Built-in symbol as configured, at order `m`.
    pub fn exotic(&self, m: f64) -> Exotic<f64> {
        let mut s = Exotic::new(self.n, m, self.rho);
        if self.symbol.id == "exotic-multiplier" {
            s.kappa = 0.0;
        }
        if let Some(c) = self.symbol.phase {
            s.phase = c;
        }
        if let Some(a) = self.symbol.wobble {
            s.wobble = a;
        }
        if let Some(k) = self.symbol.kappa {
            s.kappa = k;
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_echo() {
        let c: ExperimentConfig = toml::from_str("experiment = \"lambda-count\"").unwrap();
        assert_eq!(c, ExperimentConfig::new(Experiment::LambdaCount));
        assert_eq!((c.n, c.points, c.period, c.rho, c.seed), (1, 256, 40.0, 0.5, 42));
        let back: ExperimentConfig = toml::from_str(&toml::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<ExperimentConfig>("experiment = \"opnorm\"\nsede = 3").is_err());
        assert!(toml::from_str::<ExperimentConfig>("experiment = \"opnorm\"\n[symbol]\nid = \"exotic\"\nfoo = 1").is_err());
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::new(Experiment::Opnorm);
        assert!(c.validate().is_ok());
        c.points = 255;
        assert!(c.validate().is_err());
        c.points = 128;
        c.n = 2;
        assert!(c.validate().is_err());
        c.points = 64;
        assert!(c.validate().is_ok());
        c.rho = 1.0;
        assert!(c.validate().is_err());
        let mut counts = ExperimentConfig::new(Experiment::LambdaCount);
        counts.n = 2;
        assert!(counts.validate().is_ok());
        c.rho = 0.5;
        c.symbol.id = "nope".into();
        assert!(c.validate().is_err());
    }
}
