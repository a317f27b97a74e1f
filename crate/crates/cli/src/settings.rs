//! Command-line flags, the `key = value` config file, and their merge.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;
use crate::table::Format;

#[derive(Debug, Parser)]
#[command(
    name = "dicke",
    version,
    about = "Mean-field spectra, phase structure and verification runs for the biased Dicke model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub mode: Mode,
}

#[derive(Debug, Subcommand)]
pub enum Mode {
    /// Normal-mode frequencies of the ground and metastable branches versus bias.
    #[command(alias = "epsilon_sweep")]
    EpsilonSweep(Flags),
    /// Symmetry-point slopes, bistability width and line separation versus G/G_c.
    #[command(alias = "coupling_sweep")]
    CouplingSweep(Flags),
    /// Phase, stable-state count and line count on a (G/G_c, ε) grid.
    #[command(alias = "phase_diagram")]
    PhaseDiagram(Flags),
    /// Stationary state and frequencies at ε = 0 versus G/G_c.
    #[command(alias = "symmetry_tables")]
    SymmetryTables(Flags),
    /// Critical points and profile of the tilted quartic well.
    #[command(alias = "quartic_demo")]
    QuarticDemo(Flags),
    /// Fixed points and avoided-crossing visibility of an inhomogeneous ensemble.
    Ensemble(Flags),
    /// Run the oracle checks; exits with status 2 if any fails.
    Verify(Flags),
    /// Escape-rate estimate of the metastable state versus N.
    Decay(Flags),
}

impl Mode {
    pub fn flags(&self) -> &Flags {
        match self {
            Mode::EpsilonSweep(f)
            | Mode::CouplingSweep(f)
            | Mode::PhaseDiagram(f)
            | Mode::SymmetryTables(f)
            | Mode::QuarticDemo(f)
            | Mode::Ensemble(f)
            | Mode::Verify(f)
            | Mode::Decay(f) => f,
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Qubit gap Δ in units of ħω.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Collective coupling G = √N g in units of ħω.
    #[arg(long)]
    pub coupling: Option<f64>,
    /// Fixed bias ε (decay, symmetry tables use 0).
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon: Option<f64>,
    /// Bias grid `start:stop:steps`.
    #[arg(long, allow_hyphen_values = true)]
    pub epsilon_range: Option<String>,
    /// Grid of G/G_c, `start:stop:steps`.
    #[arg(long)]
    pub coupling_range: Option<String>,
    /// Qubit count; `decay` accepts a comma-separated list.
    #[arg(long)]
    pub n_qubits: Option<String>,
    /// Per-qubit parameters, CSV with header `delta,epsilon,g`.
    #[arg(long)]
    pub ensemble_csv: Option<PathBuf>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// `csv` (default) or `json`.
    #[arg(long)]
    pub format: Option<String>,
    /// Config file with `key = value` lines; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Quadratic coefficient η of the quartic well.
    #[arg(long, allow_hyphen_values = true)]
    pub eta: Option<f64>,
    /// Linear tilt of the quartic well.
    #[arg(long, allow_hyphen_values = true)]
    pub tilt: Option<f64>,
    /// Potential samples per quartic case.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Leave out the exact-diagonalization checks.
    #[arg(long)]
    pub skip_ed: bool,
    /// Fault injection for testing the verification suite.
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Range {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let bad = || CliError::Config(format!("range `{s}` is not start:stop:steps"));
        let [a, b, n] = parts.as_slice() else {
            return Err(bad());
        };
        let start: f64 = a.parse().map_err(|_| bad())?;
        let stop: f64 = b.parse().map_err(|_| bad())?;
        let steps: usize = n.parse().map_err(|_| bad())?;
        if steps < 2 {
            return Err(CliError::Config(format!("range `{s}`: steps must be at least 2")));
        }
        if !(start < stop) || !start.is_finite() || !stop.is_finite() {
            return Err(CliError::Config(format!("range `{s}`: start must be below stop")));
        }
        Ok(Self { start, stop, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                if i == self.steps - 1 {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * i as f64 / n
                }
            })
            .collect()
    }
}

/// Flags merged over the config file.
#[derive(Debug, Clone)]
pub struct Settings {
    flags: Flags,
}

const FILE_KEYS: &[&str] = &[
    "delta",
    "coupling",
    "epsilon",
    "epsilon-range",
    "coupling-range",
    "n-qubits",
    "ensemble-csv",
    "out",
    "format",
    "eta",
    "tilt",
    "samples",
    "skip-ed",
];

fn parse_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Config(format!(
                "{}:{}: expected `key = value`",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().replace('_', "-");
        if !FILE_KEYS.contains(&key.as_str()) {
            return Err(CliError::Config(format!(
                "{}:{}: unknown key `{key}`",
                path.display(),
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.parse()
        .map_err(|_| CliError::Config(format!("config key `{key}`: cannot parse `{v}`")))
}

impl Settings {
    pub fn resolve(flags: &Flags) -> Result<Self, CliError> {
        let mut merged = flags.clone();
        if let Some(path) = &flags.config {
            let file = parse_config(path)?;
            // Relative paths in the file are taken relative to the file.
            let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
            for (key, v) in &file {
                match key.as_str() {
                    "delta" => merged.delta = merged.delta.or(Some(num(key, v)?)),
                    "coupling" => merged.coupling = merged.coupling.or(Some(num(key, v)?)),
                    "epsilon" => merged.epsilon = merged.epsilon.or(Some(num(key, v)?)),
                    "eta" => merged.eta = merged.eta.or(Some(num(key, v)?)),
                    "tilt" => merged.tilt = merged.tilt.or(Some(num(key, v)?)),
                    "samples" => merged.samples = merged.samples.or(Some(num(key, v)?)),
                    "epsilon-range" => merged.epsilon_range = merged.epsilon_range.take().or(Some(v.clone())),
                    "coupling-range" => merged.coupling_range = merged.coupling_range.take().or(Some(v.clone())),
                    "n-qubits" => merged.n_qubits = merged.n_qubits.take().or(Some(v.clone())),
                    "format" => merged.format = merged.format.take().or(Some(v.clone())),
                    "ensemble-csv" => {
                        merged.ensemble_csv = merged.ensemble_csv.take().or(Some(base.join(v)))
                    }
                    "out" => merged.out = merged.out.take().or(Some(base.join(v))),
                    "skip-ed" => merged.skip_ed = merged.skip_ed || num::<bool>(key, v)?,
                    _ => unreachable!(),
                }
            }
        }
        Ok(Self { flags: merged })
    }

    fn required(value: Option<f64>, name: &str) -> Result<f64, CliError> {
        value.ok_or_else(|| CliError::Config(format!("missing --{name}")))
    }

    pub fn delta(&self) -> Result<f64, CliError> {
        Self::required(self.flags.delta, "delta")
    }

    pub fn coupling(&self) -> Result<f64, CliError> {
        Self::required(self.flags.coupling, "coupling")
    }

    pub fn epsilon(&self) -> f64 {
        self.flags.epsilon.unwrap_or(0.0)
    }

    pub fn epsilon_range(&self) -> Result<Range, CliError> {
        Range::parse(self.flags.epsilon_range.as_deref().unwrap_or("-1.5:1.5:301"))
    }

    pub fn coupling_range(&self) -> Result<Range, CliError> {
        Range::parse(self.flags.coupling_range.as_deref().unwrap_or("0.2:3:57"))
    }

    pub fn n_qubits_list(&self) -> Result<Vec<u32>, CliError> {
        let raw = self
            .flags
            .n_qubits
            .as_deref()
            .ok_or_else(|| CliError::Config("missing --n-qubits".into()))?;
        raw.split(',')
            .map(|s| match s.trim().parse::<u32>() {
                Ok(n) if n > 0 => Ok(n),
                _ => Err(CliError::Config(format!("--n-qubits: `{s}` is not a positive integer"))),
            })
            .collect()
    }

    pub fn ensemble_csv(&self) -> Result<&Path, CliError> {
        self.flags
            .ensemble_csv
            .as_deref()
            .ok_or_else(|| CliError::Config("missing --ensemble-csv".into()))
    }

    pub fn out(&self) -> Option<&Path> {
        self.flags.out.as_deref()
    }

    pub fn format(&self) -> Result<Format, CliError> {
        match &self.flags.format {
            None => Ok(Format::Csv),
            Some(s) => s.parse().map_err(CliError::Config),
        }
    }

    pub fn quartic_case(&self) -> Option<(f64, f64)> {
        match (self.flags.eta, self.flags.tilt) {
            (None, None) => None,
            (eta, tilt) => Some((eta.unwrap_or(-1.0), tilt.unwrap_or(0.0))),
        }
    }

    pub fn samples(&self) -> usize {
        self.flags.samples.unwrap_or(201)
    }

    pub fn skip_ed(&self) -> bool {
        self.flags.skip_ed
    }

    pub fn inject_fault(&self) -> Option<&str> {
        self.flags.inject_fault.as_deref()
    }
}
